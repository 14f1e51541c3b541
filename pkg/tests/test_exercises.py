from pathlib import Path

import pytest

from etudeforge.chords import ChordLabel, ChordQuality
from etudeforge.exercises import (
    ExerciseError,
    HarmonicSkeleton,
    SkeletonEntry,
    build_method_book,
    diatonic_pitch_classes,
    harmonic_skeleton,
    key_name,
    key_tonic,
    lh_accompaniment_exercise,
    rhythm_exercise,
    scale_exercise,
    write_bundle,
)
from etudeforge.musicxml import parse_musicxml
from etudeforge.score import KeySignature, TimeSignature, pitch_to_midi, validate_score
from etudeforge.simplify import simplify_score

from helpers import ev, make_score

FIXTURES = Path(__file__).parent / "fixtures"
D = 4
EM = KeySignature(1, "minor")


def comptine():
    return parse_musicxml((FIXTURES / "comptine_excerpt.musicxml").read_bytes()).score


def block_measure(names, melody="B4", divisions=D):
    events = [ev(melody, 16, 0, divisions, voice=1, staff=1)]
    for i, name in enumerate(names):
        events.append(ev(name, 16, 0, divisions, voice=5, staff=2, chord=(i > 0)))
    if not names:
        events.append(ev(None, 16, 0, divisions, voice=5, staff=2))
    return events


class TestKeyHelpers:
    def test_tonics(self):
        assert key_tonic(KeySignature(0, "major")) == 0
        assert key_tonic(KeySignature(0, "minor")) == 9
        assert key_tonic(EM) == 4
        assert key_tonic(KeySignature(-1, "major")) == 5

    def test_names(self):
        assert key_name(KeySignature(0, "major")) == "C major"
        assert key_name(EM) == "E minor"
        assert key_name(KeySignature(-3, "minor")) == "C minor"
        assert key_name(KeySignature(6, "major")) == "F# major"

    def test_diatonic_sets(self):
        assert diatonic_pitch_classes(KeySignature(0)) == {0, 2, 4, 5, 7, 9, 11}
        assert diatonic_pitch_classes(EM) == {4, 6, 7, 9, 11, 0, 2}


class TestHarmonicSkeleton:
    def test_e_minor_block_chord(self):
        s = make_score([block_measure(["E2", "B2", "E3", "G3"])], divisions=D, key=EM)
        skeleton = harmonic_skeleton(s)
        assert len(skeleton.entries) == 1
        assert skeleton.entries[0].label == ChordLabel(4, ChordQuality.MIN)
        assert skeleton.key == EM

    def test_single_note_is_unknown(self):
        s = make_score([block_measure(["C2"])], divisions=D)
        [entry] = harmonic_skeleton(s).entries
        assert entry.label.quality is ChordQuality.UNKNOWN
        assert entry.label.root == 0

    def test_empty_lh_measure_has_no_entry(self):
        s = make_score([block_measure(["E2", "B2", "E3", "G3"]), block_measure([])],
                       divisions=D, key=EM)
        skeleton = harmonic_skeleton(s)
        assert [e.measure_index for e in skeleton.entries] == [1]

    def test_inversion_labeled_with_bass(self):
        s = make_score([block_measure(["E2", "G2", "C3"])], divisions=D)
        [entry] = harmonic_skeleton(s).entries
        assert entry.label.text() == "C:maj/E"

    def test_comptine_progression(self):
        skeleton = harmonic_skeleton(simplify_score(comptine()).output)
        labels = [e.label.text() for e in skeleton.entries]
        assert labels == ["E:min", "C:maj", "G:maj", "D:maj", "E:min"]


def entry(label, time=TimeSignature(4, 4), index=1):
    return SkeletonEntry(index, label, time)


def skeleton_of(*labels, key=EM, divisions=D, title="Study"):
    entries = tuple(entry(lab, index=i + 1) for i, lab in enumerate(labels))
    return HarmonicSkeleton(entries=entries, key=key, divisions=divisions, title=title)


def staff1_pitches(measure):
    return [e.pitch for e in measure.events if e.staff == 1 and e.pitch is not None]


class TestScaleExercise:
    def test_e_minor_scale_from_e(self):
        out = scale_exercise(skeleton_of(ChordLabel(4, ChordQuality.MIN)))
        [measure] = out.parts[0].measures
        names = [str(p) for p in staff1_pitches(measure)]
        assert names == ["E4", "F#4", "G4", "A4", "B4", "C5", "D5", "E5"]

    def test_c_major_scale_in_c(self):
        skeleton = skeleton_of(ChordLabel(0, ChordQuality.MAJ),
                               key=KeySignature(0, "major"))
        [measure] = scale_exercise(skeleton).parts[0].measures
        names = [str(p) for p in staff1_pitches(measure)]
        assert names == ["C4", "D4", "E4", "F4", "G4", "A4", "B4", "C5"]

    def test_unknown_quality_rests_over_chord(self):
        skeleton = skeleton_of(ChordLabel(4, ChordQuality.UNKNOWN))
        [measure] = scale_exercise(skeleton).parts[0].measures
        assert staff1_pitches(measure) == []
        lh = [e for e in measure.events if e.staff == 2]
        midis = sorted(pitch_to_midi(e.pitch) for e in lh)
        assert midis == [52, 59]  # root and fifth, octave 3

    def test_sustained_chord_tones(self):
        out = scale_exercise(skeleton_of(ChordLabel(4, ChordQuality.MIN)))
        [measure] = out.parts[0].measures
        lh = [e for e in measure.events if e.staff == 2]
        assert {pitch_to_midi(e.pitch) % 12 for e in lh} == {4, 7, 11}
        capacity = measure.time.capacity(out.divisions)
        assert all(e.duration.ticks == capacity for e in lh)

    def test_short_measure_truncates_scale(self):
        skeleton = skeleton_of(ChordLabel(4, ChordQuality.MIN))
        entries = (SkeletonEntry(1, ChordLabel(4, ChordQuality.MIN),
                                 TimeSignature(3, 4)),)
        skeleton = HarmonicSkeleton(entries, EM, D, "Study")
        [measure] = scale_exercise(skeleton).parts[0].measures
        assert len(staff1_pitches(measure)) == 6

    def test_empty_skeleton_rejected(self):
        with pytest.raises(ExerciseError):
            scale_exercise(HarmonicSkeleton((), EM, D, "Empty"))

    def test_all_keys_all_diatonic_roots(self):
        for fifths in range(-7, 8):
            for mode in ("major", "minor"):
                key = KeySignature(fifths, mode)
                collection = diatonic_pitch_classes(key)
                for root in sorted(collection):
                    skeleton = skeleton_of(ChordLabel(root, ChordQuality.MAJ), key=key)
                    [measure] = scale_exercise(skeleton).parts[0].measures
                    pitches = staff1_pitches(measure)
                    pcs = [pitch_to_midi(p) % 12 for p in pitches]
                    assert pcs[0] == root, (key, root)
                    assert set(pcs) <= collection, (key, root)

    def test_chromatic_root_yields_rests(self):
        # Eb is not diatonic in E minor
        skeleton = skeleton_of(ChordLabel(3, ChordQuality.MAJ))
        [measure] = scale_exercise(skeleton).parts[0].measures
        assert staff1_pitches(measure) == []

    def test_output_validates(self):
        skeleton = harmonic_skeleton(simplify_score(comptine()).output)
        assert validate_score(scale_exercise(skeleton)) == []


class TestRhythmExercise:
    def test_pitches_move_to_root(self):
        melody = [ev(n, 4, i * 4, D, voice=1, staff=1)
                  for i, n in enumerate(["G4", "A4", "B4", "C5"])]
        lh = [ev(n, 16, 0, D, voice=5, staff=2, chord=(i > 0))
              for i, n in enumerate(["E2", "B2", "G3"])]
        s = make_score([melody + lh], divisions=D, key=EM)
        out = rhythm_exercise(s)
        [measure] = out.parts[0].measures
        names = [str(p) for p in staff1_pitches(measure)]
        assert names == ["E4", "E4", "E4", "E4"]
        durations = [(e.onset, e.duration.ticks) for e in measure.events
                     if e.staff == 1]
        assert durations == [(0, 4), (4, 4), (8, 4), (12, 4)]

    def test_rests_preserved(self):
        melody = [ev("G4", 4, 0, D), ev(None, 4, 4, D), ev("B4", 8, 8, D)]
        lh = [ev("C2", 16, 0, D, voice=5, staff=2)]
        out = rhythm_exercise(make_score([melody + lh], divisions=D))
        [measure] = out.parts[0].measures
        kinds = [(e.is_rest, e.onset) for e in measure.events if e.staff == 1]
        assert kinds == [(False, 0), (True, 4), (False, 8)]

    def test_lh_emptied_to_rests(self):
        s = make_score([block_measure(["E2", "B2", "E3", "G3"])], divisions=D, key=EM)
        out = rhythm_exercise(s)
        [measure] = out.parts[0].measures
        lh = [e for e in measure.events if e.staff == 2]
        assert len(lh) == 1 and lh[0].is_rest

    def test_no_melody_rejected(self):
        lh_only = [ev("C2", 16, 0, D, voice=5, staff=2)]
        with pytest.raises(ExerciseError):
            rhythm_exercise(make_score([lh_only], divisions=D))

    def test_fallback_root_is_c(self):
        melody = [ev("G4", 16, 0, D)]
        lh = [ev(None, 16, 0, D, voice=5, staff=2)]
        out = rhythm_exercise(make_score([melody + lh], divisions=D))
        [measure] = out.parts[0].measures
        assert [str(p) for p in staff1_pitches(measure)] == ["C4"]

    def test_onset_duration_multiset_preserved_exactly(self):
        from collections import Counter

        simplified = simplify_score(comptine()).output
        out = rhythm_exercise(simplified)
        for m_in, m_out in zip(simplified.parts[0].measures,
                               out.parts[0].measures):
            timing_in = Counter(
                (e.onset, e.duration.ticks) for e in m_in.events if e.staff == 1
            )
            timing_out = Counter(
                (e.onset, e.duration.ticks) for e in m_out.events if e.staff == 1
            )
            assert timing_in == timing_out, m_in.index


class TestLhAccompanimentExercise:
    def test_staff2_copied_verbatim(self):
        source = comptine()
        out = lh_accompaniment_exercise(source)
        for m_src, m_out in zip(source.parts[0].measures, out.parts[0].measures):
            src_lh = [e for e in m_src.events if e.staff == 2]
            out_lh = [e for e in m_out.events if e.staff == 2]
            assert src_lh == out_lh, m_src.index

    def test_staff1_is_rests(self):
        out = lh_accompaniment_exercise(comptine())
        for measure in out.parts[0].measures:
            rh = [e for e in measure.events if e.staff == 1]
            assert len(rh) == 1 and rh[0].is_rest

    def test_no_lh_rejected(self):
        s = make_score([[ev("C4", 16, 0, D)]], divisions=D)
        with pytest.raises(ExerciseError):
            lh_accompaniment_exercise(s)


class TestBuildMethodBook:
    def test_comptine_bundle_shape(self):
        bundle = build_method_book(comptine())
        assert len(bundle.exercises) == 3
        assert [kind for kind, _ in bundle.exercises] == [
            "scale", "melodic-rhythm", "lh-accompaniment",
        ]
        assert len(bundle.manifest["chords"]) == 5
        assert bundle.manifest["key"] == "E minor"
        assert bundle.manifest["source_measures"] == 5

    def test_single_measure_score(self):
        s = make_score([block_measure(["C2", "G2", "E3"])], divisions=D,
                       key=KeySignature(0, "major"))
        bundle = build_method_book(s)
        for _, exercise in bundle.exercises:
            assert len(exercise.parts[0].measures) == 1

    def test_invalid_score_rejected(self):
        with pytest.raises(ExerciseError):
            build_method_book(make_score([[ev("C4", 3, 0, D)]], divisions=D))

    def test_every_score_validates(self):
        bundle = build_method_book(comptine())
        assert validate_score(bundle.simplified) == []
        for _, exercise in bundle.exercises:
            assert validate_score(exercise) == []

    def test_deterministic_bundles(self, tmp_path):
        a = tmp_path / "a"
        b = tmp_path / "b"
        write_bundle(build_method_book(comptine()), a)
        write_bundle(build_method_book(comptine()), b)
        names = sorted(p.name for p in a.iterdir())
        assert names == [
            "exercise-lh.musicxml", "exercise-rhythm.musicxml",
            "exercise-scale.musicxml", "manifest.json", "simplified.musicxml",
        ]
        for name in names:
            assert (a / name).read_bytes() == (b / name).read_bytes(), name
