"""End-to-end experiment pipelines.

``run_attack`` trains the target NIDS on benign traffic, measures the
original detection counts, runs the configured attack, and scores the
mutated traffic. ``run_defense`` hardens the detector and replays the same
attack against it. ``correlate`` measures how feature-space distance
relates to traffic-space mutation overhead.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

import numpy as np

from ..errors import EmptyResult, NoValidPairs, TooFewValidSamples
from ..features.surrogate import (
    ExtractorConfig, ExtractorKind, FeaturePipeline, build_surrogate,
)
from ..gan import generate_adversarial, train_gan
from ..metrics import (
    EvaluationReport, adversarial_feature_scores, adversarial_training,
    afr_reduce, feature_selection_l1, mimicry_rate, precision_recall_f1,
    probability_decline_rate,
)
from ..models import SUPERVISED_KINDS, calibrate_threshold, train_detector
from ..pso import FitnessEvaluator, PsoConfig, mutate
from ..traffic.baselines import random_dup, random_st
from ..traffic.model import OverheadBudget, TrafficTrace
from ..traffic.pcap import read_pcap
from ..traffic.safety import SafetyReport, check_safety
from .config import AttackKind, ExperimentConfig
from .synth import synth_benign, synth_malicious

_STAGE_SEEDS = {
    "benign": 11, "malicious": 12, "detector": 13, "surrogate": 14,
    "gan": 15, "gan_sample": 20, "pso": 16, "baseline": 17, "defense": 18,
    "correlate": 19,
}


def stage_rng(seed: int, stage: str) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, _STAGE_SEEDS[stage]]))


@dataclass
class AttackRun:
    config: ExperimentConfig
    benign: TrafficTrace
    malicious: TrafficTrace
    mutated: TrafficTrace
    target: FeaturePipeline
    surrogate: Optional[FeaturePipeline]
    detector: object
    benign_norm: np.ndarray
    mal_norm: np.ndarray                 # target space, original malicious units
    surr_mal_norm: Optional[np.ndarray]
    f_adver: Optional[np.ndarray]
    fitness_history: List[float]
    safety: SafetyReport
    report: EvaluationReport
    attacker_ip: Optional[str]


def build_traces(config: ExperimentConfig) -> Tuple[TrafficTrace, TrafficTrace, Optional[str]]:
    """(benign, malicious, attacker_ip); synthetic malicious traffic starts
    one quiet gap after the benign segment ends."""
    tc = config.traffic
    if tc.benign_pcap:
        benign = read_pcap(tc.benign_pcap)
    else:
        benign = synth_benign(tc.benign, stage_rng(config.seed, "benign"))
    if tc.malicious_pcap:
        return benign, read_pcap(tc.malicious_pcap), None

    start = (benign.packets[-1].timestamp if len(benign) else 0.0) + tc.segment_gap
    if tc.malicious_kind.upper() == "SCAN":
        spec = replace(tc.scan, start_time=start)
        attacker = spec.attacker_ip
    else:
        spec = replace(tc.flood, start_time=start)
        attacker = spec.attacker_ip
    malicious = synth_malicious(tc.malicious_kind, spec, stage_rng(config.seed, "malicious"))
    return benign, malicious, attacker


def prepare_target(config: ExperimentConfig, benign: TrafficTrace,
                   malicious: TrafficTrace):
    """Target pipeline primed on benign traffic plus a calibrated detector."""
    pipeline = FeaturePipeline(ExtractorConfig(kind=ExtractorKind(config.extractor_kind)))
    ben_rows = pipeline.prime(benign)
    pipeline.fit_normalization(ben_rows)
    ben_norm = pipeline.apply_normalization(ben_rows)
    mal_norm, _ = pipeline.extract_normalized(malicious)

    detector = _train_calibrated(config, ben_norm, mal_norm)
    return pipeline, detector, ben_norm, mal_norm


def _train_calibrated(config: ExperimentConfig, ben_norm: np.ndarray,
                      mal_norm: np.ndarray):
    rng = stage_rng(config.seed, "detector")
    if config.detector_kind in SUPERVISED_KINDS:
        rows = np.vstack([ben_norm, mal_norm])
        labels = np.concatenate([np.zeros(len(ben_norm)), np.ones(len(mal_norm))])
        detector = train_detector(config.detector_kind, rows, labels,
                                  hyper=config.detector_hyper, rng=rng)
    else:
        detector = train_detector(config.detector_kind, ben_norm,
                                  hyper=config.detector_hyper, rng=rng)
    detector.threshold = calibrate_threshold(
        detector.score_batch(ben_norm), config.calibration_percentile)
    return detector


def prepare_surrogate(config: ExperimentConfig, target: FeaturePipeline,
                      benign: TrafficTrace, malicious: TrafficTrace):
    """Attacker-side pipeline with its own normalization, primed on the
    benign traffic the attacker observes."""
    rng = stage_rng(config.seed, "surrogate")
    if config.knowledge_fraction == 1.0:
        surrogate = FeaturePipeline(ExtractorConfig(
            kind=target.config.kind, lambdas=target.config.lambdas,
            include_pool=target.config.include_pool,
            known_mask=target.mask.copy()))
    else:
        surrogate = build_surrogate(target, config.knowledge_fraction, rng)
    surr_ben = surrogate.prime(benign)
    surrogate.fit_normalization(surr_ben)
    surr_ben_norm = surrogate.apply_normalization(surr_ben)
    surr_mal_norm, _ = surrogate.extract_normalized(malicious)
    return surrogate, surr_ben_norm, surr_mal_norm


def evaluate_attack(config: ExperimentConfig, target: FeaturePipeline, detector,
                    surrogate: Optional[FeaturePipeline],
                    ben_norm: np.ndarray, mal_norm: np.ndarray,
                    malicious: TrafficTrace, mutated: TrafficTrace,
                    f_adver: Optional[np.ndarray]) -> EvaluationReport:
    """Score original and mutated traffic and assemble the full report."""
    h = detector.threshold
    scores_orig = detector.score_batch(mal_norm)
    detected_original = int(np.sum(scores_orig > h))

    mut_rows, mut_mal = target.extract_normalized(mutated)
    scores_mut = detector.score_batch(mut_rows) if len(mut_rows) else np.zeros(0)
    detected_mut_orig = int(np.sum(scores_mut[mut_mal] > h))
    detected_mut_craft = int(np.sum(scores_mut[~mut_mal] > h))

    pdr = None
    mal_scores_mut = scores_mut[mut_mal]
    if len(mal_scores_mut) == len(scores_orig):
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                pdr = probability_decline_rate(scores_orig, mal_scores_mut)
        except NoValidPairs:
            pdr = None

    mmr = None
    if f_adver is not None and surrogate is not None:
        surr_orig, _ = surrogate.extract_normalized(malicious)
        surr_rows, surr_mal = surrogate.extract_normalized(mutated)
        surr_mut = surr_rows[surr_mal]
        if len(surr_mut) == len(surr_orig):
            try:
                mmr = mimicry_rate(surr_orig, surr_mut, f_adver)
            except NoValidPairs:
                mmr = None

    labels = np.concatenate([np.zeros(len(ben_norm), dtype=int),
                             np.ones(len(mal_norm), dtype=int)])
    preds = np.concatenate([
        detector.predict_batch(ben_norm).astype(int),
        (scores_orig > h).astype(int),
    ])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        precision, recall, f1 = precision_recall_f1(labels, preds)

    return EvaluationReport.from_counts(
        detected_original, detected_mut_orig, detected_mut_craft,
        probability_decline_rate=pdr, mimicry_rate=mmr,
        precision=precision, recall=recall, f1=f1,
        meta={
            "attack": config.attack.value,
            "detector": config.detector_kind,
            "threshold": h,
            "n_malicious_units": int(len(mal_norm)),
            "craft_ratio": config.budget.craft_ratio,
            "time_stretch": config.budget.time_stretch,
            "knowledge_fraction": config.knowledge_fraction,
            "seed": config.seed,
        },
    )


_GAN_RETRIES = 4


def _adversarial_features(config: ExperimentConfig, surr_mal_norm: np.ndarray,
                          surr_ben_norm: np.ndarray) -> np.ndarray:
    """Train the generator/discriminator pair and sample adversarial
    features. An empty filter result signals a bad equilibrium; retrain with
    a fresh (still deterministic) seed a few times before giving up."""
    base = stage_rng(config.seed, "gan")
    last_exc = None
    for attempt in range(_GAN_RETRIES):
        gan_cfg = replace(config.gan, seed=int(base.integers(1 << 31)))
        gen, disc, _ = train_gan(surr_mal_norm, surr_ben_norm, gan_cfg)
        try:
            return generate_adversarial(
                gen, disc, surr_mal_norm, config.n_per,
                stage_rng(config.seed, "gan_sample"), limit=config.n_adver)
        except EmptyResult as exc:
            last_exc = exc
    raise last_exc


def _run_mutation(config: ExperimentConfig, kind: AttackKind,
                  malicious: TrafficTrace, target: FeaturePipeline, detector,
                  surrogate, surr_ben_norm, f_adver, attacker_ip):
    pso_cfg = replace(config.pso, seed=int(stage_rng(config.seed, "pso").integers(1 << 31)))
    if kind is AttackKind.GAN_PSO:
        evaluator = FitnessEvaluator(malicious, config.budget, surrogate,
                                     targets=f_adver, k_nearest=pso_cfg.k_nearest,
                                     rebuild_seed=config.seed, attacker_ip=attacker_ip)
        return mutate(malicious, evaluator, pso_cfg, config.budget, attacker_ip=attacker_ip)
    if kind is AttackKind.PSO_ONLY:
        targets = surr_ben_norm
        if len(targets) > config.n_adver:
            pick = stage_rng(config.seed, "pso").choice(
                len(targets), size=config.n_adver, replace=False)
            targets = targets[pick]
        evaluator = FitnessEvaluator(malicious, config.budget, surrogate,
                                     targets=targets, k_nearest=pso_cfg.k_nearest,
                                     rebuild_seed=config.seed, attacker_ip=attacker_ip)
        return mutate(malicious, evaluator, pso_cfg, config.budget, attacker_ip=attacker_ip)
    if kind is AttackKind.TWA:
        evaluator = FitnessEvaluator(malicious, config.budget, target,
                                     score_fn=detector.score_batch,
                                     rebuild_seed=config.seed, attacker_ip=attacker_ip)
        return mutate(malicious, evaluator, pso_cfg, config.budget, attacker_ip=attacker_ip)
    if kind is AttackKind.RANDOM_ST:
        return random_st(malicious, config.budget, stage_rng(config.seed, "baseline")), []
    return random_dup(malicious, config.budget, stage_rng(config.seed, "baseline")), []


def run_attack(config: ExperimentConfig, stage_log: Optional[list] = None) -> AttackRun:
    """Full attacker-vs-detector experiment; everything derives from
    config + seed, so reruns are byte-identical."""

    def stage(name: str):
        if stage_log is not None:
            stage_log.append(name)

    config.validate()
    stage("traffic")
    benign, malicious, attacker_ip = build_traces(config)

    stage("target")
    target, detector, ben_norm, mal_norm = prepare_target(config, benign, malicious)

    surrogate = None
    surr_ben_norm = surr_mal_norm = None
    f_adver = None
    kind = config.attack

    if kind in (AttackKind.GAN_PSO, AttackKind.PSO_ONLY):
        stage("surrogate")
        surrogate, surr_ben_norm, surr_mal_norm = prepare_surrogate(
            config, target, benign, malicious)

    if kind is AttackKind.GAN_PSO:
        stage("gan")
        f_adver = _adversarial_features(config, surr_mal_norm, surr_ben_norm)

    stage("mutation")
    mutated, history = _run_mutation(config, kind, malicious, target, detector,
                                     surrogate, surr_ben_norm, f_adver, attacker_ip)

    stage("evaluation")
    safety = check_safety(malicious, mutated, config.budget)
    report = evaluate_attack(config, target, detector, surrogate,
                             ben_norm, mal_norm, malicious, mutated, f_adver)

    return AttackRun(
        config=config, benign=benign, malicious=malicious, mutated=mutated,
        target=target, surrogate=surrogate, detector=detector,
        benign_norm=ben_norm, mal_norm=mal_norm,
        surr_mal_norm=surr_mal_norm, f_adver=f_adver,
        fitness_history=list(history), safety=safety, report=report,
        attacker_ip=attacker_ip,
    )


# ---------------------------------------------------------------------------
# defenses


@dataclass
class DefenseOutcome:
    defense: str
    retain_fraction: float
    before: EvaluationReport
    after: EvaluationReport
    f1_before: float
    f1_after: float
    kept_mask: Optional[np.ndarray] = None
    robustness_scores: Optional[np.ndarray] = None

    @property
    def delta_malicious_evasion_rate(self) -> Optional[float]:
        if (self.before.malicious_evasion_rate is None
                or self.after.malicious_evasion_rate is None):
            return None
        return self.before.malicious_evasion_rate - self.after.malicious_evasion_rate

    @property
    def delta_f1(self) -> float:
        return self.f1_after - self.f1_before

    def to_dict(self) -> dict:
        import json
        return {
            "defense": self.defense,
            "retain_fraction": self.retain_fraction,
            "before": json.loads(self.before.to_json()),
            "after": json.loads(self.after.to_json()),
            "delta_malicious_evasion_rate": self.delta_malicious_evasion_rate,
            "f1_before": self.f1_before,
            "f1_after": self.f1_after,
            "delta_f1": self.delta_f1,
        }


def _masked_pipeline(base: FeaturePipeline, keep_within_enabled: np.ndarray,
                     benign: TrafficTrace):
    """New target pipeline restricted to a subset of the enabled dims, primed
    and normalized on the same benign traffic."""
    enabled = np.flatnonzero(base.mask)
    new_mask = np.zeros(len(base.mask), dtype=bool)
    new_mask[enabled[keep_within_enabled]] = True
    pipeline = FeaturePipeline(ExtractorConfig(
        kind=base.config.kind, lambdas=base.config.lambdas,
        include_pool=base.config.include_pool, known_mask=new_mask))
    ben_rows = pipeline.prime(benign)
    pipeline.fit_normalization(ben_rows)
    ben_norm = pipeline.apply_normalization(ben_rows)
    return pipeline, ben_norm


def run_defense(config: ExperimentConfig, defense: str,
                retain_fraction: float = 0.8,
                base_run: Optional[AttackRun] = None) -> DefenseOutcome:
    """Apply one defense (AT, FS, or AFR) and replay the same-seed attack
    against the hardened detector.

    The defender's simulation reuses the run's adversarial artifacts, so the
    gray-box configuration is assumed for AT/AFR (the defender can always
    simulate the gray-box attacker against its own system).
    """
    defense = defense.upper()
    if defense not in ("AT", "FS", "AFR"):
        raise ValueError(f"unknown defense {defense!r}")
    run = base_run if base_run is not None else run_attack(config)
    rng = stage_rng(config.seed, "defense")

    mut_rows, mut_mal = run.target.extract_normalized(run.mutated)
    mutated_mal_norm = mut_rows[mut_mal]

    if defense == "AT":
        if run.f_adver is None:
            raise ValueError("adversarial training needs a run with adversarial features")
        if run.f_adver.shape[1] != run.mal_norm.shape[1]:
            raise ValueError("adversarial training needs gray-box (same-space) features")
        detector, _held = adversarial_training(
            config.detector_kind, run.benign_norm,
            None, run.f_adver, config.calibration_percentile, rng,
            malicious_rows=(run.mal_norm if config.detector_kind in SUPERVISED_KINDS else None),
            hyper=config.detector_hyper)
        pipeline, ben_norm = run.target, run.benign_norm
        kept = None
        scores = None
    else:
        if defense == "FS":
            rows = np.vstack([run.benign_norm, run.mal_norm])
            labels = np.concatenate([np.zeros(len(run.benign_norm)),
                                     np.ones(len(run.mal_norm))])
            kept = feature_selection_l1(rows, labels, retain_fraction, rng=rng)
            scores = None
        else:  # AFR
            if run.f_adver is None or run.f_adver.shape[1] != run.mal_norm.shape[1]:
                raise ValueError("feature reduction needs gray-box adversarial features")
            if len(mutated_mal_norm) != len(run.mal_norm):
                raise ValueError("mutated/original unit counts differ; cannot pair")
            scores = adversarial_feature_scores(
                run.mal_norm, mutated_mal_norm, run.f_adver,
                run.detector.score_batch, run.detector.threshold)
            kept = afr_reduce(scores, retain_fraction)
        pipeline, ben_norm = _masked_pipeline(run.target, np.flatnonzero(kept), run.benign)
        mal_norm_new, _ = pipeline.extract_normalized(run.malicious)
        detector = _train_calibrated(config, ben_norm, mal_norm_new)

    mal_norm_after, _ = pipeline.extract_normalized(run.malicious)
    after = evaluate_attack(config, pipeline, detector, run.surrogate,
                            ben_norm, mal_norm_after, run.malicious,
                            run.mutated, run.f_adver)

    return DefenseOutcome(
        defense=defense, retain_fraction=retain_fraction,
        before=run.report, after=after,
        f1_before=run.report.f1, f1_after=after.f1,
        kept_mask=kept, robustness_scores=scores,
    )


# ---------------------------------------------------------------------------
# correlation test


@dataclass
class CorrelationSample:
    packet_index: int
    distance: float
    proximity: float
    time_overhead: float
    volume_overhead: float
    valid: bool

    @property
    def total_overhead(self) -> float:
        return self.time_overhead + self.volume_overhead


@dataclass
class CorrelationResult:
    pcc: float
    samples: List[CorrelationSample]

    def valid_samples(self) -> List[CorrelationSample]:
        return [s for s in self.samples if s.valid]


def _random_mutant_vector(layout, budget_use: float, rng: np.random.Generator):
    """One random position using roughly `budget_use` of the budget."""
    x = np.zeros(layout.dims)
    base = layout.base_timestamps
    gaps = np.diff(base)
    stretch = 1.0 + (layout.budget.time_stretch - 1.0) * budget_use * rng.random(len(gaps))
    x[layout.ts_slice] = np.concatenate([[layout.t0], layout.t0 + np.cumsum(gaps * stretch)])
    counts = rng.random(layout.n_pkts) < budget_use
    x[layout.count_slice] = counts.astype(float)
    for i in range(layout.n_pkts):
        for j in range(layout.capacity):
            x[layout.craft_index(i, j, 0)] = rng.uniform(0.0, layout.gap_hi)
            x[layout.craft_index(i, j, 1)] = float(rng.integers(3, 5))
            x[layout.craft_index(i, j, 2)] = float(rng.integers(0, 1461))
    from ..pso.search import clip_position
    return clip_position(x, layout)


def correlate(config: ExperimentConfig, n_mal: int = 25, targets_per: int = 8,
              distance_band: Tuple[float, float] = (0.5, 5.0),
              validity_threshold: float = 0.7,
              min_valid: int = 10) -> CorrelationResult:
    """Distance-vs-overhead correlation.

    Targets are sampled on the reachable feature manifold by extracting
    random mutants of varying budget use, keeping those inside the
    normalized distance band. The swarm then chases each target and the
    Pearson correlation is computed between target distance and the
    (time + volume) overhead of the solution, over the valid samples.
    """
    if n_mal < 10:
        raise ValueError("need at least 10 malicious features")
    rng = stage_rng(config.seed, "correlate")

    benign, malicious, attacker_ip = build_traces(config)
    surrogate = FeaturePipeline(ExtractorConfig(
        kind=ExtractorKind(config.extractor_kind)))
    ben_rows = surrogate.prime(benign)
    surrogate.fit_normalization(ben_rows)
    mal_norm, _ = surrogate.extract_normalized(malicious)

    n_units = len(mal_norm)
    picks = np.linspace(0, n_units - 1, num=min(n_mal, n_units)).astype(int)
    layout = None
    lo, hi = distance_band

    samples: List[CorrelationSample] = []
    for p in picks:
        evaluator = FitnessEvaluator(
            malicious, config.budget, surrogate,
            targets=np.zeros((1, mal_norm.shape[1])),  # placeholder, replaced per target
            row_filter=[int(p)], rebuild_seed=config.seed, attacker_ip=attacker_ip)
        if layout is None:
            layout = evaluator._layout
        f_mal = mal_norm[p]
        found = 0
        attempts = 0
        while found < targets_per and attempts < targets_per * 12:
            attempts += 1
            budget_use = rng.random()
            x = _random_mutant_vector(layout, budget_use, rng)
            trace = evaluator.rebuild_trace(x)
            f_tar = evaluator.malicious_rows(trace)[0]
            dist = float(np.linalg.norm(f_tar - f_mal))
            if not lo <= dist <= hi:
                continue
            found += 1

            evaluator.targets = np.atleast_2d(f_tar)
            pso_cfg = replace(config.pso,
                              seed=int(rng.integers(1 << 31)))
            mutated, _ = mutate(malicious, evaluator, pso_cfg, config.budget,
                                attacker_ip=attacker_ip)
            f_hat = evaluator.malicious_rows(mutated)[0]
            proximity = 1.0 - float(np.linalg.norm(f_hat - f_tar)) / dist
            time_overhead = (mutated.elapsed / malicious.elapsed
                             if malicious.elapsed > 0 else 1.0)
            volume_overhead = mutated.byte_volume / malicious.byte_volume
            samples.append(CorrelationSample(
                packet_index=int(p), distance=dist, proximity=proximity,
                time_overhead=time_overhead, volume_overhead=volume_overhead,
                valid=proximity > validity_threshold,
            ))

    valid = [s for s in samples if s.valid]
    if len(valid) < min_valid:
        raise TooFewValidSamples(
            f"only {len(valid)} valid samples (need {min_valid})")
    xs = np.array([s.distance for s in valid])
    ys = np.array([s.total_overhead for s in valid])
    pcc = float(np.corrcoef(xs, ys)[0, 1])
    return CorrelationResult(pcc=pcc, samples=samples)


def pearson(xs, ys) -> float:
    """Plain Pearson correlation coefficient."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    return float(np.corrcoef(xs, ys)[0, 1])
