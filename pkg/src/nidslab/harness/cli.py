"""Command-line interface.

Subcommands: synth | extract | train-nids | train-gan | attack | defend |
correlate | report. Every run writes its artifacts plus a manifest.json
under --out; exit code 0 on success, 2 on configuration errors, 3 on
pipeline failures (the manifest then records the failing stage).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace

from ..errors import ConfigError, NidsLabError
from ..features.csvio import write_feature_csv
from ..features.surrogate import ExtractorConfig, ExtractorKind, FeaturePipeline
from ..gan import train_gan
from ..traffic.pcap import read_pcap, write_pcap
from .artifacts import (
    write_attack_artifacts, write_correlation_artifacts, write_defense_artifacts,
)
from .config import ExperimentConfig, load_config
from .manifest import write_manifest
from .pipeline import (
    build_traces, correlate, prepare_surrogate, prepare_target, run_attack,
    run_defense,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PIPELINE = 3


def _load(args) -> ExperimentConfig:
    config = load_config(args.config) if args.config else ExperimentConfig()
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    config.validate()
    return config


def _finish(out_dir, config, names, status="ok", stage=None, reason=None):
    os.makedirs(out_dir, exist_ok=True)
    write_manifest(out_dir, config.to_dict(), names, status=status,
                   failure_stage=stage, failure_reason=reason)


def cmd_synth(args) -> int:
    config = _load(args)
    benign, malicious, _ = build_traces(config)
    os.makedirs(args.out, exist_ok=True)
    write_pcap(os.path.join(args.out, "benign.pcap"), benign)
    write_pcap(os.path.join(args.out, "malicious.pcap"), malicious)
    _finish(args.out, config, ["benign.pcap", "malicious.pcap"])
    print(f"wrote {len(benign)} benign and {len(malicious)} malicious packets to {args.out}")
    return EXIT_OK


def cmd_extract(args) -> int:
    config = _load(args)
    pipeline = FeaturePipeline(ExtractorConfig(kind=ExtractorKind(config.extractor_kind)))
    trace = read_pcap(args.pcap)
    rows = pipeline.prime(trace)
    os.makedirs(args.out, exist_ok=True)
    write_feature_csv(os.path.join(args.out, "features.csv"),
                      pipeline.feature_names(), rows)
    _finish(args.out, config, ["features.csv"])
    print(f"extracted {rows.shape[0]} x {rows.shape[1]} features to {args.out}")
    return EXIT_OK


def cmd_train_nids(args) -> int:
    config = _load(args)
    benign, malicious, _ = build_traces(config)
    target, detector, ben_norm, _ = prepare_target(config, benign, malicious)
    os.makedirs(args.out, exist_ok=True)
    detector.save_json(os.path.join(args.out, "detector.json"))
    with open(os.path.join(args.out, "normalization.json"), "w") as fh:
        fh.write(target.config.normalization.to_json() + "\n")
    _finish(args.out, config, ["detector.json", "normalization.json"])
    print(f"trained {config.detector_kind}, threshold {detector.threshold!r}")
    return EXIT_OK


def cmd_train_gan(args) -> int:
    config = _load(args)
    benign, malicious, _ = build_traces(config)
    target, _, _, _ = prepare_target(config, benign, malicious)
    surrogate, surr_ben_norm, surr_mal_norm = prepare_surrogate(
        config, target, benign, malicious)
    gen, disc, history = train_gan(surr_mal_norm, surr_ben_norm, config.gan)
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "gan.json"), "w") as fh:
        json.dump({"generator": gen.to_dict(), "discriminator": disc.to_dict(),
                   "history": history}, fh, sort_keys=True)
    _finish(args.out, config, ["gan.json"])
    print(f"trained GAN for {config.gan.epochs} epochs")
    return EXIT_OK


def cmd_attack(args) -> int:
    config = _load(args)
    stage_log: list = []
    try:
        run = run_attack(config, stage_log=stage_log)
    except NidsLabError as exc:
        _finish(args.out, config, [], status="failed",
                stage=stage_log[-1] if stage_log else "setup", reason=str(exc))
        print(f"attack failed during {stage_log[-1] if stage_log else 'setup'}: {exc}",
              file=sys.stderr)
        return EXIT_PIPELINE
    names = write_attack_artifacts(run, args.out)
    _finish(args.out, config, names)
    r = run.report
    print(f"attack={config.attack.value} detected_original={r.detected_original} "
          f"mer={_fmt(r.malicious_evasion_rate)} der={_fmt(r.detection_evasion_rate)} "
          f"pdr={_fmt(r.probability_decline_rate)} safety_passed={run.safety.passed}")
    return EXIT_OK


def cmd_defend(args) -> int:
    config = _load(args)
    try:
        outcome = run_defense(config, args.defense, args.retain)
    except NidsLabError as exc:
        _finish(args.out, config, [], status="failed", stage="defense", reason=str(exc))
        print(f"defense failed: {exc}", file=sys.stderr)
        return EXIT_PIPELINE
    names = write_defense_artifacts(outcome, args.out)
    _finish(args.out, config, names)
    print(f"defense={outcome.defense} delta_mer={_fmt(outcome.delta_malicious_evasion_rate)} "
          f"delta_f1={outcome.delta_f1:+.4f}")
    return EXIT_OK


def cmd_correlate(args) -> int:
    config = _load(args)
    try:
        result = correlate(config, n_mal=args.n_mal, targets_per=args.targets_per)
    except NidsLabError as exc:
        _finish(args.out, config, [], status="failed", stage="correlate", reason=str(exc))
        print(f"correlation failed: {exc}", file=sys.stderr)
        return EXIT_PIPELINE
    names = write_correlation_artifacts(result, args.out)
    _finish(args.out, config, names)
    print(f"pcc={result.pcc:.4f} over {len(result.valid_samples())} valid samples")
    return EXIT_OK


def cmd_report(args) -> int:
    path = os.path.join(args.out, "report.json")
    if not os.path.exists(path):
        print(f"no report.json under {args.out}", file=sys.stderr)
        return EXIT_CONFIG
    with open(path) as fh:
        report = json.load(fh)
    for key in ("detected_original", "detected_mutated", "detected_mutated_original",
                "detected_mutated_crafted", "detection_evasion_rate",
                "malicious_evasion_rate", "probability_decline_rate",
                "mimicry_rate", "precision", "recall", "f1"):
        print(f"{key}: {report.get(key)}")
    return EXIT_OK


def _fmt(value) -> str:
    return "n/a" if value is None else f"{value:.4f}"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nidslab",
        description="Traffic-space evasion attacks on ML-based intrusion detectors, "
                    "with robustness scoring defenses.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_out=True):
        p.add_argument("--config", help="experiment config JSON")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        if needs_out:
            p.add_argument("--out", required=True, help="output directory")

    common(sub.add_parser("synth", help="generate synthetic traffic pcaps"))
    p = sub.add_parser("extract", help="extract features from a pcap")
    common(p)
    p.add_argument("--pcap", required=True)
    common(sub.add_parser("train-nids", help="train and calibrate the target detector"))
    common(sub.add_parser("train-gan", help="train the adversarial feature generator"))
    common(sub.add_parser("attack", help="run a full evasion experiment"))
    p = sub.add_parser("defend", help="apply a defense and replay the attack")
    common(p)
    p.add_argument("--defense", required=True, choices=["AT", "FS", "AFR", "at", "fs", "afr"])
    p.add_argument("--retain", type=float, default=0.8)
    p = sub.add_parser("correlate", help="distance-vs-overhead correlation test")
    common(p)
    p.add_argument("--n-mal", type=int, default=25, dest="n_mal")
    p.add_argument("--targets-per", type=int, default=8, dest="targets_per")
    p = sub.add_parser("report", help="print the report of a finished run")
    p.add_argument("--out", required=True)
    return parser


_COMMANDS = {
    "synth": cmd_synth,
    "extract": cmd_extract,
    "train-nids": cmd_train_nids,
    "train-gan": cmd_train_gan,
    "attack": cmd_attack,
    "defend": cmd_defend,
    "correlate": cmd_correlate,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NidsLabError as exc:
        print(f"pipeline failure: {exc}", file=sys.stderr)
        return EXIT_PIPELINE


if __name__ == "__main__":
    sys.exit(main())
