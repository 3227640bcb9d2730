"""Dataset round-trips, loader validation, decimation, and the synthesizer."""
import json

import numpy as np
import pytest

from myobench.dataio import (ClassSpec, Dataset, DatasetError, SynthConfig, Trial,
                             decimate, default_class_specs, load_dataset,
                             save_dataset, synthesize_emg)
from myobench.signals import SegmentationConfig, Signal, amplitude_spectrum, segment
from myobench.time_features import rms


def tiny_dataset():
    rng = np.random.default_rng(3)
    trials = [
        Trial(trial_id=f"t{i}", label="hand_open" if i % 2 else "hand_close",
              subject="s1", group="strong", channels=["ch1", "ch2"],
              data=rng.standard_normal((40, 2)) * 12.345678901234)
        for i in range(4)
    ]
    return Dataset(classes=["hand_close", "hand_open"], rate=1000.0, trials=trials)


class TestRoundTrip:
    def test_save_then_load_is_bit_exact(self, tmp_path):
        dataset = tiny_dataset()
        manifest = save_dataset(dataset, tmp_path / "d")
        loaded = load_dataset(manifest)
        assert loaded.classes == dataset.classes
        assert loaded.rate == dataset.rate
        assert len(loaded.trials) == len(dataset.trials)
        for a, b in zip(loaded.trials, dataset.trials):
            assert (a.trial_id, a.label, a.subject, a.group) == \
                   (b.trial_id, b.label, b.subject, b.group)
            assert a.channels == b.channels
            np.testing.assert_array_equal(a.data, b.data)

    def test_loaded_channel_count(self, tmp_path):
        manifest = save_dataset(tiny_dataset(), tmp_path / "d")
        loaded = load_dataset(manifest)
        assert loaded.channel_count == 2


class TestLoaderErrors:
    def write_manifest(self, tmp_path, **overrides):
        dataset = tiny_dataset()
        manifest_path = save_dataset(dataset, tmp_path / "d")
        manifest = json.loads(manifest_path.read_text())
        manifest.update(overrides)
        manifest_path.write_text(json.dumps(manifest))
        return manifest_path, manifest

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(DatasetError, match="manifest not found"):
            load_dataset(tmp_path / "nope.json")

    def test_missing_trial_file(self, tmp_path):
        path, manifest = self.write_manifest(tmp_path)
        manifest["trials"][0]["path"] = "absent.csv"
        path.write_text(json.dumps(manifest))
        with pytest.raises(DatasetError, match="missing trial file.*absent.csv"):
            load_dataset(path)

    def test_unknown_label(self, tmp_path):
        path, manifest = self.write_manifest(tmp_path)
        manifest["trials"][0]["label"] = "jazz_hands"
        path.write_text(json.dumps(manifest))
        with pytest.raises(DatasetError, match="unknown label.*jazz_hands"):
            load_dataset(path)

    def test_rate_mismatch(self, tmp_path):
        path, manifest = self.write_manifest(tmp_path)
        manifest["trials"][0]["sampling_rate_hz"] = 3000.0
        path.write_text(json.dumps(manifest))
        with pytest.raises(DatasetError, match="rate mismatch"):
            load_dataset(path)

    def test_non_numeric_sample(self, tmp_path):
        path, manifest = self.write_manifest(tmp_path)
        trial_file = path.parent / manifest["trials"][0]["path"]
        lines = trial_file.read_text().splitlines()
        lines[3] = "oops," + lines[3].split(",")[1]
        trial_file.write_text("\n".join(lines))
        with pytest.raises(DatasetError, match="non-numeric"):
            load_dataset(path)

    def test_channel_name_mismatch(self, tmp_path):
        path, manifest = self.write_manifest(tmp_path)
        manifest["trials"][0]["channels"] = ["left", "right"]
        path.write_text(json.dumps(manifest))
        with pytest.raises(DatasetError, match="channel names"):
            load_dataset(path)


class TestDecimate:
    def test_factor_one_is_identity(self):
        sig = Signal(np.sin(np.arange(500) * 0.01), 3000.0)
        out = decimate(sig, 1)
        np.testing.assert_array_equal(out.samples, sig.samples)
        assert out.rate == sig.rate

    def test_passband_tone_survives(self):
        rate = 3000.0
        t = np.arange(int(rate)) / rate
        sig = Signal(np.sin(2 * np.pi * 100.0 * t), rate)
        out = decimate(sig, 3)
        assert out.rate == 1000.0
        # Trim filter edges, then compare RMS against the ideal tone level.
        core = out.samples[100:-100]
        assert rms(core) == pytest.approx(1.0 / np.sqrt(2.0), rel=0.02)
        spec = amplitude_spectrum(core, out.rate)
        assert spec.freqs[np.argmax(spec.amplitudes)] == pytest.approx(100.0, abs=2.0)

    def test_stopband_tone_is_suppressed(self):
        rate = 3000.0
        t = np.arange(int(rate)) / rate
        sig = Signal(np.sin(2 * np.pi * 1400.0 * t), rate)
        out = decimate(sig, 3)
        in_power = np.mean(sig.samples ** 2)
        out_power = np.mean(out.samples[100:-100] ** 2)
        assert out_power < 0.01 * in_power

    def test_bad_factor(self):
        sig = Signal(np.ones(100), 3000.0)
        with pytest.raises(ValueError):
            decimate(sig, 0)


class TestSynthesize:
    def test_same_seed_is_bit_identical(self):
        cfg = SynthConfig(classes=tuple(default_class_specs(2)), channels=2,
                          trials_per_class=2, trial_ms=500, seed=77)
        a, b = synthesize_emg(cfg), synthesize_emg(cfg)
        for ta, tb in zip(a.trials, b.trials):
            np.testing.assert_array_equal(ta.data, tb.data)

    def test_different_seed_differs(self):
        base = dict(classes=tuple(default_class_specs(1)), channels=1,
                    trials_per_class=1, trial_ms=500)
        a = synthesize_emg(SynthConfig(seed=1, **base))
        b = synthesize_emg(SynthConfig(seed=2, **base))
        assert not np.array_equal(a.trials[0].data, b.trials[0].data)

    def test_spectral_mass_stays_in_band(self):
        spec = ClassSpec(name="hand_open", band=(20.0, 450.0), amplitude=1.0)
        cfg = SynthConfig(classes=(spec,), channels=1, trials_per_class=3,
                          trial_ms=2000, seed=5)
        dataset = synthesize_emg(cfg)
        for trial in dataset.trials:
            s = amplitude_spectrum(trial.data[:, 0], dataset.rate)
            power = s.amplitudes ** 2
            outside = (s.freqs < 20.0) | (s.freqs > 450.0)
            assert power[outside].sum() < 0.05 * power.sum()

    def test_trials_hit_the_class_amplitude(self):
        spec = ClassSpec(name="hand_open", band=(30.0, 200.0), amplitude=42.0)
        dataset = synthesize_emg(SynthConfig(classes=(spec,), channels=2,
                                             trials_per_class=2, trial_ms=1000, seed=6))
        for trial in dataset.trials:
            for ch in range(2):
                assert rms(trial.data[:, ch]) == pytest.approx(42.0, rel=1e-9)

    def test_window_rms_is_stationary(self):
        # 256 ms windows stay within 30% of the class amplitude scale.
        specs = default_class_specs(4)
        dataset = synthesize_emg(SynthConfig(classes=tuple(specs), channels=1,
                                             trials_per_class=2, trial_ms=3000, seed=8))
        by_name = {s.name: s for s in specs}
        cfg = SegmentationConfig(window_ms=256, slide_ms=64)
        for trial in dataset.trials:
            amp = by_name[trial.label].amplitude
            for window in segment(trial.signal(0, dataset.rate), cfg):
                assert abs(rms(window) - amp) < 0.30 * amp

    def test_group_tags_and_labels(self):
        dataset = synthesize_emg(SynthConfig(classes=tuple(default_class_specs(4)),
                                             channels=1, trials_per_class=1,
                                             trial_ms=500, seed=9))
        groups = {t.label: t.group for t in dataset.trials}
        assert set(groups.values()) == {"strong", "weak"}
        assert all(t.label in dataset.classes for t in dataset.trials)

    def test_degenerate_band_rejected(self):
        with pytest.raises(ValueError, match="degenerate band"):
            ClassSpec(name="x", band=(100.0, 100.0), amplitude=1.0)
        with pytest.raises(ValueError, match="10-500"):
            ClassSpec(name="x", band=(5.0, 100.0), amplitude=1.0)

    def test_band_must_clear_nyquist(self):
        spec = ClassSpec(name="x", band=(10.0, 300.0), amplitude=1.0)
        with pytest.raises(ValueError, match="Nyquist"):
            SynthConfig(classes=(spec,), rate=500.0)
