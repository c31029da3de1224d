"""Monte Carlo harness, leakage audit and efficiency accounting."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from .adversary import KnowledgeRecord, guess_messages, make_adversary
from .channel import BOB, Transcript
from .common import INSUFFICIENT_Z, bit_string
from .errors import ConfigError
from .protocol1 import Protocol1Config, Protocol1Outcome, run_protocol1
from .protocol2 import Protocol2Config, Protocol2Outcome, run_protocol2
from .qubit import Rng

REPORT_FORMAT = "sqdsim-report/1"


# -- efficiency ------------------------------------------------------------

@dataclass(frozen=True)
class ResourceCount:
    """Secret bits, qubits and classical bits, excluding check overhead."""

    secret_bits: int
    qubits: int
    classical_bits: int

    @property
    def efficiency(self) -> Fraction:
        return Fraction(self.secret_bits, self.qubits + self.classical_bits)


def formula_resources(protocol: int, n: int) -> ResourceCount:
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    if protocol == 1:
        # N message photons + N fresh photons from Bob; N announced bits.
        return ResourceCount(2 * n, n + n, n)
    if protocol == 2:
        # 2N message photons; N ciphertext bits.
        return ResourceCount(2 * n, 2 * n, n)
    raise ConfigError(f"unknown protocol {protocol!r}")


def efficiency(protocol: int, n: int) -> Fraction:
    """Information-theoretical efficiency b_s / (q_t + b_t)."""
    return formula_resources(protocol, n).efficiency


def count_resources(outcome: Protocol1Outcome | Protocol2Outcome) -> ResourceCount:
    """Count the message-carrying resources a completed run actually used."""
    if outcome.aborted:
        raise ConfigError("resources are only counted for completed runs")
    t = outcome.transcript
    if isinstance(outcome, Protocol1Outcome):
        carriers = len(t.last("reorder").payload["message_positions"])
        fresh = sum(1 for a in outcome.actions
                    if a.party == BOB and a.kind == "prepare" and a.role == "message")
        classical = len(t.last("final_states").payload["bits"])
        qubits = carriers + fresh
    else:
        qubits = sum(1 for a in outcome.actions
                     if a.party == BOB and a.kind == "prepare" and a.role == "message")
        classical = len(t.last("ciphertexts").payload["bits"])
    secret = len(outcome.alice_decoded) + len(outcome.bob_decoded)
    return ResourceCount(secret, qubits, classical)


# -- leakage ---------------------------------------------------------------

def entropy_bits(hypotheses) -> float:
    """Shannon entropy of the uniform distribution over ``hypotheses``."""
    k = len(hypotheses)
    if k == 0:
        raise ValueError("empty hypothesis set")
    # -sum over k outcomes of (1/k) log2(1/k)
    return math.log2(k)


def leakage_audit(transcript: Transcript, ground_truth=None,
                  protocol: int | None = None) -> list[float]:
    """Per-position entropy (bits) of the secrets given the public record only.

    ``ground_truth`` is an optional ``(msg_alice, msg_bob)``; when given the
    true pair must be among the surviving hypotheses.
    """
    sets = guess_messages(KnowledgeRecord(), transcript, protocol)
    if ground_truth is not None:
        alice, bob = (str(x) for x in ground_truth)
        for i, hyp in enumerate(sets):
            if (int(alice[i]), int(bob[i])) not in hyp:
                raise AssertionError(f"position {i}: true bits excluded by audit")
    return [entropy_bits(h) for h in sets]


# -- experiments -----------------------------------------------------------

@dataclass(frozen=True)
class ExperimentSpec:
    protocol: int
    n: int
    m: int | None = None
    adversary: str = "passive"
    trials: int = 1
    seed: int = 0
    threshold: float = 0.05
    p_ctrl: float = 0.05
    p_zsift: float = 0.05
    max_attempts: int = 16
    messages: str = "random"  # random | zeros | ones

    def __post_init__(self):
        if self.protocol not in (1, 2):
            raise ConfigError(f"protocol must be 1 or 2, got {self.protocol!r}")
        if int(self.trials) < 1:
            raise ConfigError("trials must be >= 1")
        if int(self.max_attempts) < 1:
            raise ConfigError("max_attempts must be >= 1")
        if self.messages not in ("random", "zeros", "ones"):
            raise ConfigError(f"unknown message mode {self.messages!r}")
        if not 0 <= int(self.seed) < 1 << 64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        make_adversary(self.adversary)
        self.config(0)

    def config(self, seed: int) -> Protocol1Config | Protocol2Config:
        if self.protocol == 1:
            return Protocol1Config(self.n, self.threshold, seed)
        return Protocol2Config(self.n, self.m, self.p_ctrl, self.p_zsift, seed)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentSpec":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc


def _messages(spec: ExperimentSpec, rng: Rng) -> tuple[str, str]:
    if spec.messages == "zeros":
        return "0" * spec.n, "0" * spec.n
    if spec.messages == "ones":
        return "1" * spec.n, "1" * spec.n
    return bit_string(rng.bits(spec.n)), bit_string(rng.bits(spec.n))


def run_trial(spec: ExperimentSpec, trial: int):
    """One trial, retried with a fresh derived seed on a Z-photon shortfall.

    Returns ``(outcome, msg_alice, msg_bob, attempts)``.
    """
    for attempt in range(spec.max_attempts):
        rng = Rng.for_trial(spec.seed, trial, attempt)
        msg_alice, msg_bob = _messages(spec, rng)
        adversary = make_adversary(spec.adversary)
        cfg = spec.config(spec.seed)
        runner = run_protocol1 if spec.protocol == 1 else run_protocol2
        outcome = runner(cfg, msg_alice, msg_bob, adversary, rng=rng)
        if outcome.aborted_at != INSUFFICIENT_Z:
            break
    return outcome, msg_alice, msg_bob, attempt + 1


def _check_fields(protocol: int) -> tuple[str, ...]:
    return ("step2", "step2_reflect", "step2_measure", "step5") if protocol == 1 \
        else ("ctrl", "zsift")


def _checks(outcome) -> dict[str, Any]:
    if isinstance(outcome, Protocol1Outcome):
        s2 = outcome.step2
        return {"step2": s2 and s2.total, "step2_reflect": s2 and s2.reflect,
                "step2_measure": s2 and s2.measure_resend, "step5": outcome.step5}
    return {"ctrl": outcome.ctrl, "zsift": outcome.zsift}


def trial_row(trial: int, attempts: int, outcome, msg_alice: str, msg_bob: str) -> dict:
    row: dict[str, Any] = {"trial": trial, "attempts": attempts,
                           "aborted_at": outcome.aborted_at}
    for name, stats in _checks(outcome).items():
        row[f"{name}_errors"] = None if stats is None else stats.errors
        row[f"{name}_checked"] = None if stats is None else stats.checked
        row[f"{name}_rate"] = None if stats is None else stats.rate
    if outcome.aborted:
        row.update(recovered_bits=None, total_bits=None,
                   public_entropy_mean=None, public_entropy_min=None,
                   eve_entropy_mean=None)
        return row
    recovered = sum(x == y for x, y in zip(outcome.alice_decoded, msg_bob)) + \
        sum(x == y for x, y in zip(outcome.bob_decoded, msg_alice))
    public = leakage_audit(outcome.transcript)
    eve = [entropy_bits(h) for h in guess_messages(outcome.knowledge, outcome.transcript)]
    row.update(recovered_bits=recovered, total_bits=2 * len(msg_alice),
               public_entropy_mean=math.fsum(public) / len(public),
               public_entropy_min=min(public),
               eve_entropy_mean=math.fsum(eve) / len(eve))
    return row


def _mean(values: Sequence[float]) -> float | None:
    return math.fsum(values) / len(values) if values else None


def aggregate(protocol: int, n: int, rows: Sequence[dict]) -> dict[str, Any]:
    """Order-insensitive summary statistics of per-trial rows."""
    done = [r for r in rows if r["aborted_at"] is None]
    phases: dict[str, int] = {}
    for r in rows:
        if r["aborted_at"] is not None:
            phases[r["aborted_at"]] = phases.get(r["aborted_at"], 0) + 1
    checks = {}
    for name in _check_fields(protocol):
        ran = [r for r in rows if r[f"{name}_checked"] is not None]
        errors = sum(r[f"{name}_errors"] for r in ran)
        checked = sum(r[f"{name}_checked"] for r in ran)
        checks[name] = {
            "trials": len(ran), "errors": errors, "checked": checked,
            "pooled_rate": errors / checked if checked else None,
            "mean_rate": _mean([r[f"{name}_rate"] for r in ran]),
        }
    total_bits = sum(r["total_bits"] for r in done)
    eff = efficiency(protocol, n)
    return {
        "trials": len(rows),
        "completed": len(done),
        "abort_rate": (len(rows) - len(done)) / len(rows),
        "aborts_by_phase": dict(sorted(phases.items())),
        "checks": checks,
        "recovery_accuracy": (sum(r["recovered_bits"] for r in done) / total_bits
                              if total_bits else None),
        "public_entropy_mean": _mean([r["public_entropy_mean"] for r in done]),
        "public_entropy_min": min((r["public_entropy_min"] for r in done), default=None),
        "eve_entropy_mean": _mean([r["eve_entropy_mean"] for r in done]),
        "efficiency": {"fraction": f"{eff.numerator}/{eff.denominator}",
                       "value": float(eff)},
        "retries": sum(r["attempts"] - 1 for r in rows),
    }


@dataclass
class Report:
    spec: ExperimentSpec
    rows: list[dict]
    aggregate: dict[str, Any]
    generated_at: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds"))
    transcripts: list[Transcript] = field(default_factory=list, repr=False)

    def to_dict(self, timestamp: bool = True) -> dict[str, Any]:
        d = {"format": REPORT_FORMAT, "config": asdict(self.spec),
             "seed": self.spec.seed, "aggregate": self.aggregate, "trials": self.rows}
        if timestamp:
            d["generated_at"] = self.generated_at
        return d

    def to_json(self, timestamp: bool = True) -> str:
        return json.dumps(self.to_dict(timestamp), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        if self.rows:
            writer = csv.DictWriter(buf, fieldnames=list(self.rows[0]), lineterminator="\n")
            writer.writeheader()
            for row in self.rows:
                writer.writerow({k: "" if v is None else v for k, v in row.items()})
        return buf.getvalue()

    def write(self, path: str | Path, csv_path: str | Path | None = None,
              transcript_dir: str | Path | None = None) -> None:
        Path(path).write_text(self.to_json())
        if csv_path is not None:
            Path(csv_path).write_text(self.to_csv())
        if transcript_dir is not None:
            d = Path(transcript_dir)
            d.mkdir(parents=True, exist_ok=True)
            for i, t in enumerate(self.transcripts):
                t.write(d / f"trial_{i:05d}.jsonl")


def run_experiment(spec: ExperimentSpec, keep_transcripts: bool = False) -> Report:
    rows, transcripts = [], []
    for trial in range(spec.trials):
        outcome, msg_alice, msg_bob, attempts = run_trial(spec, trial)
        rows.append(trial_row(trial, attempts, outcome, msg_alice, msg_bob))
        if keep_transcripts:
            transcripts.append(outcome.transcript)
    return Report(spec, rows, aggregate(spec.protocol, spec.n, rows),
                  transcripts=transcripts)
