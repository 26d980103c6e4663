import io

import numpy as np
import pytest

from hmmtagger.errors import (
    ConfigError,
    ModelChecksumError,
    ModelTagsetMismatchError,
    ModelVersionError,
)
from hmmtagger.model import (
    BiasSet,
    SymbolBias,
    TransitionBias,
    apply_biases,
    default_biases,
    load_biases,
    load_model,
    save_model,
    uniform_model,
)
from hmmtagger.tagset import Tag, TagSet, load_tagset


def tiny_tagset(n):
    return TagSet([Tag(i, f"T{i:02d}") for i in range(n)])


class TestUniformModel:
    def test_two_tags_three_classes(self):
        ts = tiny_tagset(2)
        m = uniform_model(ts, [(0,), (1,), (0, 1)])
        np.testing.assert_allclose(m.emission[0], [0.5, 0.0, 0.5])
        np.testing.assert_allclose(m.emission[1], [0.0, 0.5, 0.5])
        np.testing.assert_allclose(m.initial, [0.5, 0.5])
        np.testing.assert_allclose(m.transition, np.full((2, 2), 0.5))
        m.validate()

    def test_single_tag_single_class(self):
        m = uniform_model(tiny_tagset(1), [(0,)])
        assert m.initial[0] == 1.0
        assert m.transition[0, 0] == 1.0
        assert m.emission[0, 0] == 1.0

    def test_uncovered_tag_rejected(self):
        with pytest.raises(ConfigError, match="T02"):
            uniform_model(tiny_tagset(3), [(0,), (1,), (0, 1)])

    def test_empty_inventory_rejected(self):
        with pytest.raises(ConfigError):
            uniform_model(tiny_tagset(1), [])

    def test_no_zero_mask(self):
        m = uniform_model(tiny_tagset(2), [(0,), (1,)])
        assert not m.transition_zero_mask.any()


class TestApplyBiases:
    def test_prohibition_masks_and_renormalizes(self):
        ts = tiny_tagset(2)
        m = uniform_model(ts, [(0,), (1,)])
        biased = apply_biases(m, BiasSet([TransitionBias(0, 1, 0.0)], ()))
        np.testing.assert_allclose(biased.transition[0], [1.0, 0.0])
        assert biased.transition_zero_mask[0, 1]
        assert not m.transition_zero_mask.any()  # input untouched
        biased.validate()

    def test_unit_weights_are_identity(self):
        ts = tiny_tagset(3)
        m = uniform_model(ts, [(0,), (1,), (2,), (0, 1, 2)])
        every_cell = [TransitionBias(i, j, 1.0) for i in range(3) for j in range(3)]
        biased = apply_biases(m, BiasSet(every_cell, ()))
        np.testing.assert_array_equal(biased.transition, m.transition)
        np.testing.assert_array_equal(biased.emission, m.emission)
        np.testing.assert_array_equal(biased.initial, m.initial)

    def test_symbol_bias_scales_preferred_cell(self):
        # tags A,B,C; classes {A,B,C}, {A}, {B}; bias the big class toward A
        ts = tiny_tagset(3)
        m = uniform_model(ts, [(0, 1, 2), (0,), (1,)])
        biased = apply_biases(m, BiasSet((), [SymbolBias((0, 1, 2), 0, 5.0)]))
        # row A was (1/2, 1/2, 0); the biased cell grows 5x before renormalizing
        np.testing.assert_allclose(biased.emission[0], [5 / 6, 1 / 6, 0.0])
        np.testing.assert_allclose(biased.emission[1], m.emission[1])
        biased.validate()

    def test_unknown_signature_rejected(self):
        ts = tiny_tagset(2)
        m = uniform_model(ts, [(0,), (1,)])
        with pytest.raises(ConfigError, match="signature"):
            apply_biases(m, BiasSet((), [SymbolBias((0, 1), 0, 2.0)]))

    def test_unknown_tag_rejected(self):
        ts = tiny_tagset(2)
        m = uniform_model(ts, [(0,), (1,)])
        with pytest.raises(ConfigError):
            apply_biases(m, BiasSet([TransitionBias(0, 7, 2.0)], ()))

    def test_prohibition_wins_over_positive_weight(self):
        ts = tiny_tagset(2)
        m = uniform_model(ts, [(0,), (1,)])
        biased = apply_biases(m, BiasSet(
            [TransitionBias(0, 1, 9.0), TransitionBias(0, 1, 0.0)], ()))
        assert biased.transition[0, 1] == 0.0
        assert biased.transition_zero_mask[0, 1]

    def test_row_killed_entirely_rejected(self):
        ts = tiny_tagset(1)
        m = uniform_model(ts, [(0,)])
        with pytest.raises(ConfigError, match="no probability mass"):
            apply_biases(m, BiasSet([TransitionBias(0, 0, 0.0)], ()))

    def test_rows_stay_stochastic(self):
        ts = tiny_tagset(3)
        m = uniform_model(ts, [(0,), (1,), (2,), (0, 2)])
        biased = apply_biases(m, BiasSet(
            [TransitionBias(0, 1, 3.5), TransitionBias(2, 0, 0.25)],
            [SymbolBias((0, 2), 2, 7.0)]))
        biased.validate()


class TestBiasFile:
    def test_load_bundled_biases(self, elwis):
        biases = default_biases(elwis)
        assert len(biases.transition_biases) > 0
        assert len(biases.symbol_biases) > 0
        assert any(b.weight == 0 for b in biases.transition_biases)

    def test_trans_and_sym_lines(self, elwis):
        biases = load_biases(io.StringIO(
            "TRANS ART NN 8\nTRANS ART VFIN 0\nSYM NN+NE NN 2\n"), elwis)
        assert len(biases.transition_biases) == 2
        sym = biases.symbol_biases[0]
        assert sym.preferred == elwis.tag_id("NN")

    def test_unknown_tag_rejected(self, elwis):
        with pytest.raises(ConfigError, match="line 1"):
            load_biases(io.StringIO("TRANS ART NOPE 2\n"), elwis)

    def test_negative_weight_rejected(self, elwis):
        with pytest.raises(ConfigError):
            load_biases(io.StringIO("TRANS ART NN -1\n"), elwis)

    def test_preferred_outside_signature_rejected(self, elwis):
        with pytest.raises(ConfigError, match="not in the class signature"):
            load_biases(io.StringIO("SYM NN+NE ART 2\n"), elwis)

    def test_zero_symbol_weight_rejected(self, elwis):
        with pytest.raises(ConfigError):
            load_biases(io.StringIO("SYM NN+NE NN 0\n"), elwis)

    def test_garbage_line_rejected(self, elwis):
        with pytest.raises(ConfigError, match="line 1"):
            load_biases(io.StringIO("WAT NN 2\n"), elwis)


class TestPersistence:
    def test_round_trip_is_bit_exact(self):
        ts = tiny_tagset(3)
        m = apply_biases(
            uniform_model(ts, [(0,), (1,), (2,), (0, 1), (1, 2)]),
            BiasSet([TransitionBias(0, 1, 3.0), TransitionBias(1, 2, 0.0)],
                    [SymbolBias((0, 1), 1, 2.5)]))
        buf = io.BytesIO()
        save_model(m, buf)
        loaded = load_model(io.BytesIO(buf.getvalue()), ts)
        for a, b in ((m.initial, loaded.initial), (m.transition, loaded.transition),
                     (m.emission, loaded.emission)):
            assert np.array_equal(a, b)  # bit-exact, not just close
        assert np.array_equal(m.transition_zero_mask, loaded.transition_zero_mask)
        assert m.class_members == loaded.class_members
        assert m.tag_labels == loaded.tag_labels

    def test_wrong_tagset_rejected(self):
        ts = tiny_tagset(2)
        m = uniform_model(ts, [(0,), (1,)])
        buf = io.BytesIO()
        save_model(m, buf)
        with pytest.raises(ModelTagsetMismatchError):
            load_model(io.BytesIO(buf.getvalue()), tiny_tagset(3))

    def test_truncated_file_fails_checksum(self):
        ts = tiny_tagset(2)
        m = uniform_model(ts, [(0,), (1,)])
        buf = io.BytesIO()
        save_model(m, buf)
        blob = buf.getvalue()
        with pytest.raises(ModelChecksumError):
            load_model(io.BytesIO(blob[:-5]), ts)

    def test_corrupted_byte_fails_checksum(self):
        ts = tiny_tagset(2)
        m = uniform_model(ts, [(0,), (1,)])
        buf = io.BytesIO()
        save_model(m, buf)
        blob = bytearray(buf.getvalue())
        blob[len(blob) // 2] ^= 0xFF
        with pytest.raises(ModelChecksumError):
            load_model(io.BytesIO(bytes(blob)), ts)

    def test_not_a_model_file(self):
        with pytest.raises(ModelVersionError):
            load_model(io.BytesIO(b"definitely not a model" * 10), tiny_tagset(1))

    def test_file_path_round_trip(self, tmp_path):
        ts = tiny_tagset(2)
        m = uniform_model(ts, [(0,), (1,), (0, 1)])
        path = tmp_path / "m.model"
        save_model(m, path)
        loaded = load_model(path, ts)
        assert np.array_equal(m.emission, loaded.emission)
