import io

import pytest

from hmmtagger.corpusio import (
    TaggedToken,
    Token,
    default_abbreviations,
    read_pretokenized,
    read_tagged,
    tokenize_raw,
    write_pretokenized,
    write_tagged,
)
from hmmtagger.errors import DataError, FormatError
from hmmtagger.tagset import load_tagset


def surfaces(sentences):
    return [[t.surface for t in s] for s in sentences]


class TestReadPretokenized:
    def test_two_token_sentence(self):
        sents = list(read_pretokenized(io.StringIO("Der\nHund\n\n")))
        assert surfaces(sents) == [["Der", "Hund"]]

    def test_consecutive_blank_lines_collapse(self):
        sents = list(read_pretokenized(io.StringIO("a\n\n\nb\n")))
        assert surfaces(sents) == [["a"], ["b"]]

    def test_trailing_sentence_closed_at_eof(self):
        sents = list(read_pretokenized(io.StringIO("a\nb")))
        assert surfaces(sents) == [["a", "b"]]

    def test_empty_input(self):
        assert list(read_pretokenized(io.StringIO(""))) == []

    def test_crlf_equals_lf(self):
        lf = list(read_pretokenized(io.BytesIO("Der\nHund\n\nbellt\n".encode())))
        crlf = list(read_pretokenized(io.BytesIO("Der\r\nHund\r\n\r\nbellt\r\n".encode())))
        assert surfaces(lf) == surfaces(crlf)

    def test_hash_is_a_token_not_a_comment(self):
        sents = list(read_pretokenized(io.StringIO("#\nx\n")))
        assert surfaces(sents) == [["#", "x"]]

    def test_indices_increase_in_stream_order(self):
        sents = list(read_pretokenized(io.StringIO("a\nb\n\nc\n")))
        seen = [(t.sentence_index, t.token_index) for s in sents for t in s]
        assert seen == sorted(seen)
        assert seen == [(0, 0), (0, 1), (1, 0)]

    def test_invalid_utf8_reports_byte_offset(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_bytes(b"ok\n\xff\xfe\n")
        with pytest.raises(FormatError, match="byte offset 3"):
            list(read_pretokenized(path))

    def test_round_trip_with_writer(self):
        sents = [["Der", "Hund"], ["bellt", ".", "#"]]
        buf = io.StringIO()
        write_pretokenized(buf, sents)
        back = list(read_pretokenized(io.StringIO(buf.getvalue())))
        assert surfaces(back) == sents


class TestTokenizeRaw:
    def test_sentence_final_period_detached(self):
        sents = list(tokenize_raw(io.StringIO("Der Hund bellt.")))
        assert surfaces(sents) == [["Der", "Hund", "bellt", "."]]

    def test_abbreviation_keeps_period(self):
        sents = list(tokenize_raw(io.StringIO("z.B. heute"), abbreviations={"z.B."}))
        assert surfaces(sents) == [["z.B.", "heute"]]

    def test_bundled_abbreviation_list(self):
        assert "z.B." in default_abbreviations()
        sents = list(tokenize_raw(io.StringIO("z.B. heute")))
        assert surfaces(sents) == [["z.B.", "heute"]]

    def test_empty_input(self):
        assert list(tokenize_raw(io.StringIO(""))) == []

    def test_multiple_sentences(self):
        sents = list(tokenize_raw(io.StringIO("Er kam. Sie ging!")))
        assert surfaces(sents) == [["Er", "kam", "."], ["Sie", "ging", "!"]]

    def test_comma_detached_without_break(self):
        sents = list(tokenize_raw(io.StringIO("Der Hund, die Katze.")))
        assert surfaces(sents) == [["Der", "Hund", ",", "die", "Katze", "."]]

    def test_stacked_punctuation(self):
        sents = list(tokenize_raw(io.StringIO("(Er bellt.)")))
        assert surfaces(sents) == [["(Er", "bellt", ".", ")"]]

    def test_bare_punctuation_token(self):
        sents = list(tokenize_raw(io.StringIO("a . b")))
        assert surfaces(sents) == [["a", "."], ["b"]]

    def test_deterministic(self):
        text = "Der Hund bellt. Die Katze, z.B. heute, schläft!"
        a = surfaces(tokenize_raw(io.StringIO(text)))
        b = surfaces(tokenize_raw(io.StringIO(text)))
        assert a == b


class TestTagged:
    @pytest.fixture()
    def ts(self):
        return load_tagset(io.StringIO("ART\tarticle\nNN\tnoun\n$.\tstop\n"))

    def test_single_token(self, ts):
        sents = list(read_tagged(io.StringIO("Der\tART\n"), ts))
        assert len(sents) == 1
        assert sents[0][0].token.surface == "Der"
        assert sents[0][0].gold == ts.tag_id("ART")

    def test_round_trip_identity(self, ts):
        text = "Der\tART\nHund\tNN\n\n#\tNN\n.\t$.\n\n"
        sents = list(read_tagged(io.StringIO(text), ts))
        buf = io.StringIO()
        write_tagged(buf, sents, ts)
        assert buf.getvalue() == text
        again = list(read_tagged(io.StringIO(buf.getvalue()), ts))
        assert [[(t.token.surface, t.gold) for t in s] for s in again] == \
               [[(t.token.surface, t.gold) for t in s] for s in sents]

    def test_write_accepts_plain_pairs(self, ts):
        buf = io.StringIO()
        write_tagged(buf, [[("Der", 0), ("Hund", 1)]], ts)
        assert buf.getvalue() == "Der\tART\nHund\tNN\n\n"

    def test_space_instead_of_tab_rejected(self, ts):
        with pytest.raises(FormatError, match="line 1"):
            list(read_tagged(io.StringIO("Der ART\n"), ts))

    def test_unknown_tag_names_line(self, ts):
        with pytest.raises(DataError, match="line 2"):
            list(read_tagged(io.StringIO("Der\tART\nHund\tNOPE\n"), ts))

    def test_empty_token_rejected(self, ts):
        with pytest.raises(FormatError):
            list(read_tagged(io.StringIO("\tART\n"), ts))

    def test_blank_lines_separate_sentences(self, ts):
        sents = list(read_tagged(io.StringIO("Der\tART\n\n\nHund\tNN\n"), ts))
        assert len(sents) == 2

    def test_file_round_trip(self, ts, tmp_path):
        path = tmp_path / "c.tagged"
        write_tagged(path, [[("Der", 0)], [("Hund", 1), (".", 2)]], ts)
        sents = list(read_tagged(path, ts))
        assert [[(t.token.surface, t.gold) for t in s] for s in sents] == \
               [[("Der", 0)], [("Hund", 1), (".", 2)]]
