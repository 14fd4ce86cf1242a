import math

import numpy as np
import pytest

from swarmtraj.assignment import Assignment
from swarmtraj.fitness import CampaignEvaluator, evaluate
from swarmtraj.observation import UncertaintyProfile
from swarmtraj.scenario import (
    CampaignFormatError,
    LabeledObservationSet,
    ScenarioConfig,
    default_truth,
    generate,
    min_truth_elevation_deg,
    read_campaign,
    schedule,
    score_assignments,
    write_campaign,
)


@pytest.fixture(scope="module")
def campaign():
    return generate(ScenarioConfig())


class TestDefaultTruth:
    def test_ten_objects(self):
        truth = default_truth()
        assert len(truth) == 10

    def test_object_2(self):
        el = default_truth()[1]
        assert el.a == 42264.0
        assert el.e == 0.04
        assert el.inc == pytest.approx(math.radians(1.0))
        assert el.raan == pytest.approx(math.radians(10.0))
        assert el.theta == pytest.approx(math.radians(-52.0))

    def test_object_6(self):
        el = default_truth()[5]
        assert el.a == 42184.0
        assert el.e == 0.05
        assert el.inc == pytest.approx(math.radians(1.2))
        assert el.raan == pytest.approx(math.radians(20.0))
        assert el.theta == pytest.approx(math.radians(-70.0))

    def test_object_1_and_10_extremes(self):
        truth = default_truth()
        assert truth[0].a == 42064.0
        assert truth[9].a == 42204.0
        assert truth[9].e == 0.08
        assert truth[9].inc == pytest.approx(math.radians(1.4))
        assert truth[9].theta == pytest.approx(math.radians(-48.0))

    def test_all_valid(self):
        for el in default_truth():
            assert el.a > 0 and 0 <= el.e < 1 and 0 <= el.inc <= math.pi


class TestSchedule:
    def test_default_30_dates(self):
        dates, nights = schedule(ScenarioConfig())
        assert len(dates) == 30
        assert nights == tuple([0] * 10 + [1] * 10 + [2] * 10)

    def test_same_night_spacing(self):
        dates, nights = schedule(ScenarioConfig())
        for j in range(1, 30):
            if nights[j] == nights[j - 1]:
                assert dates[j] - dates[j - 1] == 1800.0

    def test_single_photo(self):
        cfg = ScenarioConfig(nights=1, photos_per_night=1,
                             night_start_offsets=(123.0,))
        dates, _ = schedule(cfg)
        assert dates == (123.0,)

    def test_overlapping_nights_rejected(self):
        cfg = ScenarioConfig(nights=2, photos_per_night=10,
                             night_start_offsets=(0.0, 10000.0))
        with pytest.raises(ValueError, match="overlaps"):
            schedule(cfg)


class TestGenerate:
    def test_truth_zero_with_default_noise_free(self, campaign):
        report = evaluate(campaign.truth_candidate, campaign.observations)
        assert report.fitness == 0.0
        summary = score_assignments(report, campaign.truth_labels)
        assert summary.purity == 1.0
        assert summary.permutation_consistency == 1.0

    def test_batch_size_law(self, campaign):
        obs = campaign.observations
        for m_j, labels in zip(obs.batch_sizes, campaign.truth_labels):
            fict = int(np.sum(labels < 0))
            assert m_j == 10 + fict
            assert m_j in (10, 11, 12)

    def test_seeded_determinism(self):
        a = generate(ScenarioConfig(seed=5))
        b = generate(ScenarioConfig(seed=5))
        for ba, bb in zip(a.observations.batches, b.observations.batches):
            for za, zb in zip(ba, bb):
                assert za.elevation == zb.elevation
                assert za.azimuth == zb.azimuth
        for la, lb in zip(a.truth_labels, b.truth_labels):
            assert np.array_equal(la, lb)

    def test_different_seed_differs(self):
        a = generate(ScenarioConfig(seed=5))
        b = generate(ScenarioConfig(seed=6))
        assert a.observations.batch_sizes != b.observations.batch_sizes

    def test_visibility_margin(self):
        assert min_truth_elevation_deg(ScenarioConfig()) > 10.0

    def test_labels_injective(self, campaign):
        for labels in campaign.truth_labels:
            objects = labels[labels >= 0]
            assert len(set(objects.tolist())) == objects.size == 10

    def test_noise_option(self):
        cfg = ScenarioConfig(measurement_noise_sigma=math.radians(0.005),
                             seed=11)
        labeled = generate(cfg)
        report = evaluate(labeled.truth_candidate, labeled.observations)
        assert report.fitness > 0.0

    def test_shuffle_invariance_of_costs(self, campaign):
        # Re-shuffling rows (different seed, same counts) must not change
        # the optimal per-date costs for the truth candidate.
        counts = tuple(int(np.sum(lab < 0)) for lab in campaign.truth_labels)
        other = generate(ScenarioConfig(fictitious_counts=counts, seed=99))
        k1 = evaluate(campaign.truth_candidate,
                      campaign.observations).per_date_costs
        k2 = evaluate(other.truth_candidate,
                      other.observations).per_date_costs
        assert np.all(k1 == 0.0) and np.all(k2 == 0.0)


class TestScoreAssignments:
    def test_adversarial_fictitious_assignment(self, campaign):
        # Hand-build a report that always picks fictitious rows where
        # available, else row 0.
        assignments = []
        n = 10
        for labels in campaign.truth_labels:
            fict = np.where(labels < 0)[0]
            row_of = []
            used = set()
            for i in range(n):
                pick = None
                for k in fict:
                    if k not in used:
                        pick = int(k)
                        break
                if pick is None:
                    pick = next(k for k in range(labels.size)
                                if k not in used)
                used.add(pick)
                row_of.append(pick)
            assignments.append(Assignment(tuple(row_of), 1.0 * n))
        import swarmtraj.fitness as fit_mod

        history = np.cumsum(np.ones((30, n)), axis=0)
        report = fit_mod.FitnessReport(
            fitness=float(history[-1].sum()),
            per_date_costs=np.full(30, float(n)),
            residual_history=history,
            assignments=tuple(assignments),
        )
        summary = score_assignments(report, campaign.truth_labels)
        assert summary.purity < 1.0
        max_fict = max(int(np.sum(lab < 0)) for lab in campaign.truth_labels)
        assert summary.purity >= 1.0 - max_fict / 10.0 - 1e-12

    def test_random_candidate_scores_in_range(self, campaign):
        from swarmtraj.swarm import SearchBounds

        rng = np.random.default_rng(3)
        bounds = SearchBounds.for_objects(10)
        ev = CampaignEvaluator(campaign.observations)
        vec = bounds.lower + rng.random(bounds.dim) * bounds.width
        summary = score_assignments(ev.report(vec), campaign.truth_labels)
        assert 0.0 <= summary.purity <= 1.0
        assert 0.0 <= summary.permutation_consistency <= 1.0

    def test_size_mismatch_rejected(self, campaign):
        report = evaluate(campaign.truth_candidate, campaign.observations)
        with pytest.raises(ValueError, match="dates"):
            score_assignments(report, campaign.truth_labels[:5])


class TestCampaignFile:
    def test_roundtrip_labeled(self, tmp_path, campaign):
        path = tmp_path / "campaign.txt"
        write_campaign(path, campaign)
        back = read_campaign(path)
        assert isinstance(back, LabeledObservationSet)
        obs1, obs2 = campaign.observations, back.observations
        assert obs1.dates == obs2.dates
        assert obs1.night_membership == obs2.night_membership
        for b1, b2 in zip(obs1.batches, obs2.batches):
            for z1, z2 in zip(b1, b2):
                assert abs(z1.elevation - z2.elevation) < 1e-14
                assert abs(z1.azimuth - z2.azimuth) < 1e-14
        for l1, l2 in zip(campaign.truth_labels, back.truth_labels):
            assert np.array_equal(l1, l2)
        for e1, e2 in zip(campaign.truth_candidate.elements,
                          back.truth_candidate.elements):
            assert e1.a == e2.a and e1.e == e2.e
            assert abs(e1.theta - e2.theta) < 1e-14

    def test_double_roundtrip_stays_lossless(self, tmp_path, campaign):
        p1 = tmp_path / "c1.txt"
        p2 = tmp_path / "c2.txt"
        write_campaign(p1, campaign)
        write_campaign(p2, read_campaign(p1))
        first = read_campaign(p1)
        second = read_campaign(p2)
        for b0, b1, b2 in zip(campaign.observations.batches,
                              first.observations.batches,
                              second.observations.batches):
            for z0, z1, z2 in zip(b0, b1, b2):
                assert abs(z1.elevation - z0.elevation) < 1e-14
                assert abs(z2.elevation - z0.elevation) < 1e-14
                assert abs(z2.azimuth - z0.azimuth) < 1e-14

    def test_unlabeled_roundtrip(self, tmp_path, campaign):
        from swarmtraj.fitness import ObservationSet

        path = tmp_path / "plain.txt"
        write_campaign(path, campaign.observations)
        back = read_campaign(path)
        assert isinstance(back, ObservationSet)
        assert not isinstance(back, LabeledObservationSet)

    def test_parse_error_carries_line_number(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("version 1\nstation 0.0 45.0 6378.137 7e-5 0.0\n"
                        "date 0.0 0 2 0.01 0.01\nmeas 10.0 20.0\n"
                        "meas bogus 20.0\n")
        with pytest.raises(CampaignFormatError, match="line 5"):
            read_campaign(path)

    def test_short_block_rejected(self, tmp_path):
        path = tmp_path / "short.txt"
        path.write_text("version 1\nstation 0.0 45.0 6378.137 7e-5 0.0\n"
                        "date 0.0 0 3 0.01 0.01\nmeas 10.0 20.0\n")
        with pytest.raises(CampaignFormatError, match="short"):
            read_campaign(path)

    def test_truth_without_labels_rejected(self, tmp_path):
        path = tmp_path / "mixed.txt"
        path.write_text("version 1\nstation 0.0 45.0 6378.137 7e-5 0.0\n"
                        "truth 42164.0 0.01 0.5 0.0 -40.0\n"
                        "date 0.0 0 1 0.01 0.01\nmeas 10.0 20.0\n")
        with pytest.raises(CampaignFormatError, match="both"):
            read_campaign(path)


class TestScenarioConfigValidation:
    def test_wrong_offsets_count(self):
        with pytest.raises(ValueError, match="offsets"):
            ScenarioConfig(nights=3, night_start_offsets=(0.0, 86400.0))

    def test_wrong_fictitious_count_length(self):
        with pytest.raises(ValueError, match="fictitious"):
            ScenarioConfig(fictitious_counts=(1, 2))

    def test_sigma_per_date(self, campaign):
        assert all(s == UncertaintyProfile(math.radians(0.01),
                                           math.radians(0.01))
                   for s in campaign.observations.sigmas)
