import math

import numpy as np
import pytest

from ultrapulse.metrics import area_passband, area_whole
from ultrapulse.optimize import (
    Objective,
    OptimizationProblem,
    canonical_free,
    derive,
    equivalence_class,
    free_phase_count,
    natural_objective,
    refine,
    sequence_for,
    verify_tables,
)
from ultrapulse.sequences import Family, GoldenRow, get_row, get_sequence, golden_tables

PI = math.pi
UB = Family.ULTRA_BROADBAND
UN = Family.ULTRA_NARROWBAND
UPB = Family.ULTRA_PASSBAND
UBPH = Family.ULTRA_BROADBAND_PHASAL


def rounded_pi(phases):
    return tuple(round(p / PI, 4) % 2.0 for p in phases)


class TestProblemValidation:
    @pytest.mark.parametrize("family,n,expected", [
        (UB, 3, 1), (UB, 11, 5), (UN, 5, 2), (UPB, 3, 2), (UPB, 9, 8),
        (UBPH, 2, 1), (UBPH, 14, 7), (UB, 1, 0),
    ])
    def test_free_phase_count(self, family, n, expected):
        assert free_phase_count(family, n) == expected

    @pytest.mark.parametrize("family,n", [
        (UB, 4), (UN, 2), (UPB, 0), (UBPH, 3), (UBPH, 0),
    ])
    def test_rejects_bad_arity(self, family, n):
        with pytest.raises(ValueError):
            OptimizationProblem(family, n)

    def test_objective_defaults_to_family_natural(self):
        assert OptimizationProblem(UB, 3).objective is Objective.MAXIMIZE_AREA
        assert OptimizationProblem(UN, 3).objective is Objective.MINIMIZE_AREA
        assert OptimizationProblem(UPB, 3).objective is Objective.MINIMIZE_PASSBAND
        assert OptimizationProblem(UBPH, 4).objective is Objective.MAXIMIZE_FIDELITY_AREA

    def test_rejects_inconsistent_objective(self):
        with pytest.raises(ValueError, match="inconsistent"):
            OptimizationProblem(UB, 3, objective=Objective.MINIMIZE_AREA)

    def test_rejects_reference_families(self):
        with pytest.raises(ValueError):
            natural_objective(Family.REFERENCE_BB2)

    def test_rejects_restart_underflow(self):
        with pytest.raises(ValueError, match="restarts"):
            derive(OptimizationProblem(UB, 3), restarts=0, seed=1)


class TestDerive:
    def test_broadband_three(self):
        res = derive(OptimizationProblem(UB, 3), restarts=8, seed=7)
        assert res.objective_value == pytest.approx(1.5, abs=1e-9)
        assert rounded_pi(res.free_phases) == (0.5,)
        assert res.converged
        assert res.n_restarts_used == 10  # table start + zero start + 8 random

    def test_narrowband_three(self):
        res = derive(OptimizationProblem(UN, 3), restarts=8, seed=7)
        assert res.objective_value == pytest.approx(0.5, abs=1e-9)
        assert rounded_pi(res.free_phases) == (0.5,)

    def test_phasal_four(self):
        res = derive(OptimizationProblem(UBPH, 4), restarts=8, seed=7)
        assert res.objective_value == pytest.approx(4.0 / 3.0, abs=1e-6)
        assert rounded_pi(res.free_phases) == (0.0, 0.6743)

    def test_single_pulse_degenerate_problem(self):
        res = derive(OptimizationProblem(UB, 1), restarts=1, seed=0)
        assert res.free_phases == ()
        assert res.objective_value == pytest.approx(1.0, abs=1e-12)
        assert res.converged

    def test_deterministic_for_fixed_seed(self):
        a = derive(OptimizationProblem(UPB, 3), restarts=6, seed=3)
        b = derive(OptimizationProblem(UPB, 3), restarts=6, seed=3)
        assert a == b

    def test_objective_value_matches_reevaluation(self):
        res = derive(OptimizationProblem(UPB, 3), restarts=6, seed=3)
        seq = sequence_for(UPB, res.free_phases)
        sigma_b, sigma_n, objective = area_passband(seq)
        assert res.objective_value == pytest.approx(objective, abs=1e-10)

    def test_more_restarts_do_not_find_better(self):
        few = derive(OptimizationProblem(UN, 3), restarts=4, seed=5)
        many = derive(OptimizationProblem(UN, 3), restarts=8, seed=5)
        assert many.objective_value <= few.objective_value + 1e-6
        assert abs(many.objective_value - few.objective_value) <= 1e-6

    def test_local_optima_catalogue_is_near_best(self):
        res = derive(OptimizationProblem(UB, 5), restarts=10, seed=9)
        assert len(res.all_local_optima) >= 1
        for phases, value in res.all_local_optima:
            assert value == pytest.approx(res.objective_value, abs=1e-3)


class TestCanonicalization:
    def test_sign_flip_picks_small_leading_phase(self):
        assert canonical_free(UB, [1.5 * PI]) == pytest.approx((0.5 * PI,))
        assert canonical_free(UB, [0.5 * PI]) == pytest.approx((0.5 * PI,))

    def test_phasal_shifts_leading_phase_to_zero(self):
        canon = canonical_free(UBPH, [0.3, 0.3 + 0.6743 * PI])
        assert canon[0] == 0.0
        assert canon[1] == pytest.approx(0.6743 * PI, abs=1e-12)

    def test_objective_invariant_under_canonicalization(self):
        rng = np.random.default_rng(17)
        for family, n in ((UB, 5), (UN, 5), (UPB, 3), (UBPH, 4)):
            d = free_phase_count(family, n)
            x = rng.uniform(0.0, 2.0 * PI, d)
            canon = canonical_free(family, x)
            before = area_whole(sequence_for(family, x))
            after = area_whole(sequence_for(family, canon))
            assert before == pytest.approx(after, abs=1e-12)


class TestEquivalence:
    def test_sign_flipped_mirror_train(self):
        assert equivalence_class(
            [0.0, PI / 2, 0.0], [0.0, -PI / 2, 0.0], UB
        )

    def test_different_families_differ(self):
        bat3 = get_sequence("Bat3").phases
        snake3 = get_sequence("Snake3").phases
        assert not equivalence_class(bat3, snake3, UB)

    def test_global_shift_is_an_equivalence(self):
        for label, family in (("Bat5", UB), ("Octopus3", UPB), ("BatPh6", UBPH)):
            phases = get_sequence(label).phases
            shifted = [p + PI / 3 for p in phases]
            assert equivalence_class(phases, shifted, family)

    def test_phasal_reversal_image(self):
        printed = get_sequence("BatPh6").phases
        image = get_sequence("BatPh6")
        from ultrapulse.sequences import build_ubph

        alt = build_ubph([0.0, 0.75 * PI, 0.75 * PI]).phases
        assert equivalence_class(printed, alt, UBPH)

    def test_rejects_length_mismatch(self):
        with pytest.raises(ValueError, match="length"):
            equivalence_class([0.0], [0.0, 1.0], UB)


class TestRefine:
    @pytest.mark.parametrize("label,family,target", [
        ("Bat5", UB, 5.0 / 3.0),
        ("Snake9", UN, 0.2),
        ("BatPh8", UBPH, 1.6),
    ])
    def test_polishing_reaches_exact_optimum(self, label, family, target):
        free = get_sequence(label).free_phases
        _, value = refine(family, free)
        assert value == pytest.approx(target, abs=1e-11)


class TestVerifyTables:
    def test_pristine_tables_pass(self):
        report = verify_tables()
        failing = [f"{c.label}/{c.metric}" for c in report.failures()]
        assert report.all_passed, failing

    def test_cell_census(self):
        report = verify_tables()
        assert len(report.cells) == 7 * 2 + 7 * 2 + 12 * 5 + 7 * 2

    def test_batph4_range_uses_enclosing_scan(self):
        report = verify_tables()
        cell = next(
            c for c in report.cells if c.label == "BatPh4" and c.metric == "range_90"
        )
        assert cell.passed
        assert "enclosing" in cell.note

    def test_corrupted_phase_fails_some_cell(self):
        rows = []
        for row in golden_tables():
            if row.label == "Bat5":
                phases = list(row.phases)
                phases[1] = 0.60  # printed value is 0.5825
                row = GoldenRow(
                    label=row.label, group=row.group, family=row.family,
                    phases=tuple(phases), n_pulses=row.n_pulses,
                    reported_range=row.reported_range,
                    reported_area=row.reported_area,
                )
            rows.append(row)
        report = verify_tables(rows=rows)
        assert not report.all_passed
        assert any(c.label == "Bat5" for c in report.failures())
        assert all(c.label == "Bat5" for c in report.failures())

    def test_variant_rows_reproduce_shared_metrics(self):
        report = verify_tables()
        for base in ("Octopus5", "Octopus7", "Octopus9"):
            cells = [
                c for c in report.cells
                if c.label.startswith(base) and c.metric in ("sigma_b", "sigma_n")
            ]
            assert cells and all(c.passed for c in cells)
