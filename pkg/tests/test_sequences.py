import io
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ultrapulse.metrics import profile_values
from ultrapulse.sequences import (
    GROUP_BROADBAND,
    GROUP_NARROWBAND,
    GROUP_PASSBAND,
    GROUP_PHASAL,
    CompositeSequence,
    Family,
    build_ub,
    build_ubph,
    build_un,
    build_upb,
    check_structure,
    dump_sequence,
    free_phases_of,
    get_row,
    get_sequence,
    golden_tables,
    list_labels,
    load_sequence,
    make_reference,
    rows_for_label,
    sequence_from_dict,
    sequence_from_row,
    sequence_to_dict,
    single_sequence,
    to_jones_stack,
)
from ultrapulse.su2 import Pulse

PI = math.pi

phase_lists = st.lists(
    st.floats(0.0, 2.0 * PI, exclude_max=True, allow_nan=False), min_size=1, max_size=6
)


def phases_pi(seq):
    return [p.phase / PI for p in seq.pulses]


class TestBuilders:
    def test_ub_three(self):
        seq = build_ub([PI / 2])
        assert phases_pi(seq) == pytest.approx([0.0, 0.5, 0.0])
        assert all(p.area == PI for p in seq.pulses)

    def test_ub_five(self):
        seq = build_ub([0.5825 * PI, 0.3737 * PI])
        assert phases_pi(seq) == pytest.approx([0.0, 0.5825, 0.3737, 0.5825, 0.0])

    def test_ub_empty_is_single(self):
        seq = build_ub([])
        assert seq.family is Family.SINGLE_PULSE
        assert seq.n_pulses == 1

    def test_un_three(self):
        seq = build_un([PI / 2])
        assert phases_pi(seq) == pytest.approx([0.5, 1.0, 1.5])

    def test_un_five(self):
        seq = build_un([0.5896 * PI, 0.4104 * PI])
        assert phases_pi(seq) == pytest.approx(
            [0.5896, 0.4104, 1.0, 2.0 - 0.4104, 2.0 - 0.5896]
        )

    def test_un_empty_is_single(self):
        assert build_un([]).family is Family.SINGLE_PULSE

    def test_upb_three(self):
        seq = build_upb([0.4691 * PI, 1.1808 * PI])
        assert [p.area / PI for p in seq.pulses] == pytest.approx([1.0, 2.0, 2.0])
        assert phases_pi(seq) == pytest.approx([0.0, 0.4691, 1.1808])
        assert seq.total_area == pytest.approx(5.0 * PI)

    def test_upb_matches_pb2_reference(self):
        seq = build_upb([PI / 2, 11 * PI / 8, 11 * PI / 8, PI / 2])
        ref = make_reference(Family.REFERENCE_PB2)
        assert phases_pi(seq) == pytest.approx(phases_pi(ref))
        assert [p.area for p in seq.pulses] == pytest.approx(
            [p.area for p in ref.pulses]
        )

    def test_upb_empty_is_single(self):
        assert build_upb([]).family is Family.SINGLE_PULSE

    def test_ubph_four(self):
        seq = build_ubph([0.0, 0.6743 * PI])
        assert phases_pi(seq) == pytest.approx([0.0, 0.6743, 0.5, 1.1743])

    def test_ubph_two(self):
        seq = build_ubph([0.0])
        assert phases_pi(seq) == pytest.approx([0.0, 0.5])

    def test_ubph_six(self):
        seq = build_ubph([0.0, 0.0, 0.75 * PI])
        assert phases_pi(seq) == pytest.approx([0.0, 0.0, 0.75, 0.5, 0.5, 1.25])

    def test_ubph_rejects_empty(self):
        with pytest.raises(ValueError):
            build_ubph([])

    @given(free=phase_lists)
    def test_ub_free_phase_round_trip(self, free):
        seq = build_ub(free)
        assert seq.free_phases == tuple(free)
        assert free_phases_of(seq) == tuple(free)

    @given(free=phase_lists)
    def test_un_free_phase_round_trip(self, free):
        seq = build_un(free)
        assert seq.free_phases == tuple(free)
        assert free_phases_of(seq) == tuple(free)

    @given(free=phase_lists)
    def test_upb_free_phase_round_trip(self, free):
        seq = build_upb(free)
        assert seq.free_phases == tuple(free)
        assert free_phases_of(seq) == tuple(free)

    @given(free=phase_lists)
    def test_ubph_free_phase_round_trip(self, free):
        seq = build_ubph(free)
        assert seq.free_phases == tuple(free)
        assert free_phases_of(seq) == tuple(free)


class TestStructureChecker:
    @pytest.mark.parametrize("label", list(list_labels()))
    def test_accepts_every_bundled_sequence(self, label):
        check_structure(get_sequence(label))

    def test_rejects_broken_mirror(self):
        seq = CompositeSequence(
            family=Family.ULTRA_BROADBAND,
            free_phases=(0.5 * PI,),
            pulses=(Pulse(PI, 0.0), Pulse(PI, 0.5 * PI), Pulse(PI, 0.1)),
            label="broken",
        )
        with pytest.raises(ValueError, match="mirror"):
            check_structure(seq)

    def test_rejects_wrong_middle_phase(self):
        seq = CompositeSequence(
            family=Family.ULTRA_NARROWBAND,
            free_phases=(0.5 * PI,),
            pulses=(Pulse(PI, 0.5 * PI), Pulse(PI, 0.9 * PI), Pulse(PI, 1.5 * PI)),
            label="broken",
        )
        with pytest.raises(ValueError, match="middle"):
            check_structure(seq)

    def test_rejects_wrong_areas(self):
        seq = CompositeSequence(
            family=Family.ULTRA_PASSBAND,
            free_phases=(0.3,),
            pulses=(Pulse(PI, 0.0), Pulse(PI, 0.3)),
            label="broken",
        )
        with pytest.raises(ValueError, match="area"):
            check_structure(seq)

    def test_rejects_wrong_half_train_shift(self):
        seq = CompositeSequence(
            family=Family.ULTRA_BROADBAND_PHASAL,
            free_phases=(0.0, 0.1),
            pulses=(Pulse(PI, 0.0), Pulse(PI, 0.1), Pulse(PI, 0.5 * PI), Pulse(PI, 0.7)),
            label="broken",
        )
        with pytest.raises(ValueError, match="pi/2"):
            check_structure(seq)

    def test_rejects_even_broadband_train(self):
        seq = CompositeSequence(
            family=Family.ULTRA_BROADBAND,
            free_phases=(0.0,),
            pulses=(Pulse(PI, 0.0), Pulse(PI, 0.0)),
            label="broken",
        )
        with pytest.raises(ValueError, match="odd"):
            check_structure(seq)


class TestGoldenTables:
    def test_row_counts_per_group(self):
        rows = golden_tables()
        by_group = {}
        for row in rows:
            by_group.setdefault(row.group, []).append(row)
        assert len(by_group[GROUP_BROADBAND]) == 7
        assert len(by_group[GROUP_NARROWBAND]) == 7
        assert len(by_group[GROUP_PASSBAND]) == 12
        assert len(by_group[GROUP_PHASAL]) == 7

    def test_bat11_row(self):
        row = get_row("Bat11")
        assert row.phases == (0.0, 0.6677, 0.5886, 0.9044, 0.7786, 0.9663)
        assert row.reported_area == pytest.approx(11.0 / 6.0, abs=0)
        assert row.reported_range == (0.123, 1.877)

    def test_snake11_row(self):
        row = get_row("Snake11")
        assert row.reported_area == pytest.approx(1.0 / 6.0, abs=0)
        assert row.reported_range == (0.926, 1.074)

    def test_batph14_row(self):
        row = get_row("BatPh14")
        assert row.reported_area == 1.75
        assert row.reported_range == (0.185, 1.815)

    def test_single_appears_in_three_tables(self):
        groups = {row.group for row in rows_for_label("single")}
        assert groups == {GROUP_BROADBAND, GROUP_NARROWBAND, GROUP_PASSBAND}

    def test_passband_variants_share_reported_metrics(self):
        for base in ("Octopus5", "Octopus7", "Octopus9"):
            rows = [r for r in golden_tables() if r.label.startswith(base)]
            assert len(rows) >= 2
            assert len({(r.reported_sigma_b, r.reported_sigma_n, r.reported_kappa,
                         r.reported_range) for r in rows}) == 1

    def test_pulse_counts_match_materialized_sequences(self):
        for row in golden_tables():
            assert sequence_from_row(row).n_pulses == row.n_pulses

    def test_registry_aliases_and_case(self):
        assert get_sequence("octopus5").label == "Octopus5a"
        assert get_sequence("bb2").label == "BB2"
        with pytest.raises(KeyError, match="unknown sequence label"):
            get_sequence("Bat4")

    def test_labels_are_unique_and_complete(self):
        labels = list_labels()
        assert len(labels) == len(set(labels)) == 31


class TestRunTimes:
    def test_pi_pulse_families_run_in_n_pi(self):
        for label in ("Bat5", "Snake7", "BatPh8", "BB2", "NB2", "single"):
            seq = get_sequence(label)
            assert seq.total_area == pytest.approx(seq.n_pulses * PI, abs=1e-12)

    @pytest.mark.parametrize("label,expected", [
        ("single", 1.0), ("Octopus3", 5.0), ("Octopus5a", 9.0),
        ("Octopus7a", 13.0), ("Octopus9a", 17.0), ("PB2", 9.0),
    ])
    def test_passband_run_time_column(self, label, expected):
        seq = get_sequence(label)
        assert seq.total_area / PI == pytest.approx(expected, abs=1e-12)
        assert expected == 2 * seq.n_pulses - 1


class TestProfileStructure:
    @pytest.mark.parametrize(
        "label", ["Bat3", "Bat5", "Bat7", "Bat9", "Bat11", "BB2"]
    )
    def test_broadband_profiles_are_mirror_symmetric(self, label):
        seq = get_sequence(label)
        grid = np.linspace(-1.0, 1.0, 2001)
        vals = profile_values(seq, grid)
        assert np.max(np.abs(vals - vals[::-1])) < 1e-10

    @pytest.mark.parametrize(
        "label", ["Snake3", "Snake5", "Snake7", "Snake9", "Snake11", "NB2"]
    )
    def test_narrowband_center_transfer(self, label):
        seq = get_sequence(label)
        assert profile_values(seq, np.array([0.0]))[0] == pytest.approx(
            1.0, abs=1e-12
        )

    @pytest.mark.parametrize("label", ["BatPh6", "BatPh10", "BatPh14", "two"])
    def test_phasal_center_fidelity_exact(self, label):
        seq = get_sequence(label)
        centre = profile_values(seq, np.array([0.0]), "fidelity")[0]
        assert centre == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("label,floor", [
        ("BatPh4", 0.885), ("BatPh8", 0.89), ("BatPh12", 0.89),
    ])
    def test_phasal_center_fidelity_recorded_floor(self, label, floor):
        seq = get_sequence(label)
        centre = profile_values(seq, np.array([0.0]), "fidelity")[0]
        print(f"{label} centre fidelity: {centre:.9f}")
        assert floor <= centre < 1.0


class TestJonesStack:
    def test_single_pulse_is_one_half_wave_plate(self):
        stack = to_jones_stack(single_sequence())
        assert len(stack) == 1
        assert stack[0].retardation == pytest.approx(PI, abs=0)
        assert stack[0].axis_angle == 0.0

    def test_bat3_axis_angles(self):
        stack = to_jones_stack(get_sequence("Bat3"))
        assert [p.axis_angle for p in stack] == pytest.approx([0.0, PI / 4, 0.0])
        assert all(p.retardation == pytest.approx(PI) for p in stack)

    def test_octopus3_retardations_and_axes(self):
        stack = to_jones_stack(get_sequence("Octopus3"))
        assert [p.retardation / PI for p in stack] == pytest.approx([1.0, 2.0, 2.0])
        assert [p.axis_angle / PI for p in stack] == pytest.approx(
            [0.0, 0.4691 / 2, 1.1808 / 2]
        )


class TestSequenceFiles:
    @pytest.mark.parametrize("label", ["Bat5", "Snake7", "Octopus3", "BatPh6", "PB2", "single"])
    def test_round_trip(self, label):
        seq = get_sequence(label)
        buf = io.StringIO()
        dump_sequence(seq, buf)
        buf.seek(0)
        loaded = load_sequence(buf)
        assert loaded.family is seq.family
        assert loaded.label == seq.label
        assert loaded.phases == pytest.approx(seq.phases, abs=1e-15)
        assert loaded.areas == pytest.approx(seq.areas, abs=1e-15)
        assert loaded.free_phases == pytest.approx(seq.free_phases, abs=1e-15)

    def test_rejects_unknown_family(self):
        doc = sequence_to_dict(get_sequence("Bat3"))
        doc["family"] = "nope"
        with pytest.raises(ValueError, match="family"):
            sequence_from_dict(doc)

    def test_rejects_wrong_units(self):
        doc = sequence_to_dict(get_sequence("Bat3"))
        doc["units"] = "radians"
        with pytest.raises(ValueError, match="units"):
            sequence_from_dict(doc)

    def test_rejects_length_mismatch(self):
        doc = sequence_to_dict(get_sequence("Bat3"))
        doc["areas"] = doc["areas"][:-1]
        with pytest.raises(ValueError, match="length"):
            sequence_from_dict(doc)

    def test_rejects_non_numeric_phases(self):
        doc = sequence_to_dict(get_sequence("Bat3"))
        doc["phases"] = ["a", "b", "c"]
        with pytest.raises(ValueError, match="phases"):
            sequence_from_dict(doc)

    def test_rejects_structurally_invalid_document(self):
        doc = sequence_to_dict(get_sequence("Bat3"))
        doc["phases"] = [0.0, 0.5, 0.25]
        with pytest.raises(ValueError, match="mirror"):
            sequence_from_dict(doc)

    def test_rejects_invalid_json(self):
        with pytest.raises(ValueError, match="JSON"):
            load_sequence(io.StringIO("{not json"))

    def test_ignores_extra_keys(self):
        doc = sequence_to_dict(get_sequence("Bat3"))
        doc["optimization"] = {"objective_value": 1.5}
        seq = sequence_from_dict(doc)
        assert seq.label == "Bat3"
