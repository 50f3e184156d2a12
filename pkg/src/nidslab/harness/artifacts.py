"""Artifact writers for attack/defense/correlation runs."""

from __future__ import annotations

import csv
import json
import os
from typing import List

from ..features.csvio import write_feature_csv
from ..traffic.model import trace_to_csv
from ..traffic.pcap import write_pcap
from .pipeline import AttackRun, CorrelationResult, DefenseOutcome


def _write(path, text: str) -> None:
    with open(path, "w") as fh:
        fh.write(text)


def write_attack_artifacts(run: AttackRun, out_dir) -> List[str]:
    os.makedirs(out_dir, exist_ok=True)
    names: List[str] = []

    def emit(name, writer):
        writer(os.path.join(out_dir, name))
        names.append(name)

    emit("benign.pcap", lambda p: write_pcap(p, run.benign))
    emit("malicious.pcap", lambda p: write_pcap(p, run.malicious))
    emit("mutated.pcap", lambda p: write_pcap(p, run.mutated))
    emit("mutated.csv", lambda p: _write(p, trace_to_csv(run.mutated)))

    names_target = run.target.feature_names()
    emit("features_original.csv",
         lambda p: write_feature_csv(p, names_target, run.mal_norm))
    if run.f_adver is not None and run.surrogate is not None:
        emit("adversarial_features.csv",
             lambda p: write_feature_csv(p, run.surrogate.feature_names(), run.f_adver))

    if run.fitness_history:
        def hist(p):
            with open(p, "w") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(["iteration", "global_best_fitness"])
                for i, fit in enumerate(run.fitness_history):
                    writer.writerow([i, repr(float(fit))])
        emit("fitness_history.csv", hist)

    emit("report.json", lambda p: _write(p, run.report.to_json() + "\n"))
    emit("detector.json", lambda p: run.detector.save_json(p))
    if run.target.config.normalization is not None:
        emit("normalization.json",
             lambda p: _write(p, run.target.config.normalization.to_json() + "\n"))

    def safety(p):
        obj = {
            "passed": run.safety.passed,
            "originals_preserved": run.safety.originals_preserved,
            "craft_count_ok": run.safety.craft_count_ok,
            "elapsed_ok": run.safety.elapsed_ok,
            "crafted_rules_ok": run.safety.crafted_rules_ok,
            "crafted_count": run.safety.crafted_count,
            "elapsed_ratio": run.safety.elapsed_ratio,
            "notes": run.safety.notes,
        }
        _write(p, json.dumps(obj, sort_keys=True, indent=2) + "\n")
    emit("safety.json", safety)
    return names


def write_defense_artifacts(outcome: DefenseOutcome, out_dir) -> List[str]:
    os.makedirs(out_dir, exist_ok=True)
    names = ["defense.json"]
    _write(os.path.join(out_dir, "defense.json"),
           json.dumps(outcome.to_dict(), sort_keys=True, indent=2) + "\n")
    if outcome.robustness_scores is not None:
        with open(os.path.join(out_dir, "robustness_scores.csv"), "w") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["dimension", "score", "kept"])
            for i, score in enumerate(outcome.robustness_scores):
                writer.writerow([i, repr(float(score)), int(outcome.kept_mask[i])])
        names.append("robustness_scores.csv")
    return names


def write_correlation_artifacts(result: CorrelationResult, out_dir) -> List[str]:
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "correlation_samples.csv"), "w") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["packet_index", "distance", "proximity",
                         "time_overhead", "volume_overhead", "valid"])
        for s in result.samples:
            writer.writerow([s.packet_index, repr(s.distance), repr(s.proximity),
                             repr(s.time_overhead), repr(s.volume_overhead),
                             int(s.valid)])
    _write(os.path.join(out_dir, "correlation.json"),
           json.dumps({"pcc": result.pcc,
                       "n_valid": len(result.valid_samples()),
                       "n_samples": len(result.samples)},
                      sort_keys=True, indent=2) + "\n")
    return ["correlation_samples.csv", "correlation.json"]
