"""Discrete-event broadcast channel with per-receiver erasures and a passive tap.

Every broadcast (masked deliveries and public symbols alike) fans out to each
terminal as a receive event; each (position, terminal) pair is erased
independently. Erasure draws are made for all n positions up front, so runs
that differ only in redundancy see identical erasure patterns.
"""
from __future__ import annotations

import csv
import heapq
import io
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import BadMask, InsufficientShares, ParamViolation
from .protocol import (
    FieldRng,
    ProtocolResult,
    ScenarioConfig,
    Transcript,
    deal,
    public_discussion,
    reconstruct,
)


@dataclass(frozen=True)
class ChannelModel:
    erasure_rate: float = 0.0
    adversary_sees_erased: bool = False
    redundancy: int = 0
    seed: int | None = None

    def __post_init__(self):
        if not 0.0 <= self.erasure_rate <= 1.0:
            raise ParamViolation(f"erasure rate must lie in [0, 1], got {self.erasure_rate}")
        if self.redundancy < 0:
            raise ParamViolation("redundancy must be >= 0")


@dataclass
class KnowledgeLedger:
    terminals: dict[int, set[int]] = field(default_factory=dict)
    adversary: set[int] = field(default_factory=set)
    adversary_masked: int = 0   # masked deliveries observed; carry no symbol

    def adversary_view(self, transcript: Transcript) -> Transcript:
        return replace(transcript, public_symbols=tuple(
            s for s in transcript.public_symbols if s.index in self.adversary))


@dataclass(frozen=True)
class SafetyReport:
    safe: bool
    adversary_count: int
    positions: tuple[int, ...]

    def __str__(self) -> str:
        if self.safe:
            return f"safe ({self.adversary_count} symbols known to the adversary)"
        return f"UNSAFE: adversary holds positions {list(self.positions)}"


def safety_check(ledger: KnowledgeLedger, k: int) -> SafetyReport:
    known = tuple(sorted(ledger.adversary))
    return SafetyReport(len(known) < k, len(known), known)


_DELIVERY, _PUBLIC = 0, 1


def simulate_noisy_run(cfg: ScenarioConfig, channel: ChannelModel) -> tuple[ProtocolResult, KnowledgeLedger]:
    """Algorithm run over the erasure channel; never raises on total erasure."""
    cfg = replace(cfg, extra_public=cfg.extra_public + channel.redundancy)
    n = cfg.params.n
    V = cfg.num_terminals
    state, _ = deal(cfg)
    transcript = public_discussion(state)
    draws = FieldRng(channel.seed).uniform(n * V).reshape(n, V)
    erased = draws < channel.erasure_rate

    ledger = KnowledgeLedger({t: set() for t in cfg.terminals})
    inbox = {t: {"deliveries": [], "public": []} for t in cfg.terminals}
    queue: list = []
    seq = 0
    for d in transcript.masked_deliveries:
        heapq.heappush(queue, (0, seq, _DELIVERY, d))
        seq += 1
    for s in transcript.public_symbols:
        heapq.heappush(queue, (1, seq, _PUBLIC, s))
        seq += 1
    while queue:
        _clock, _, kind, msg = heapq.heappop(queue)
        if kind == _DELIVERY:
            ledger.adversary_masked += 1
            if not erased[msg.index - 1, msg.terminal - 1]:
                inbox[msg.terminal]["deliveries"].append(msg)
            continue
        lost_somewhere = False
        for t in cfg.terminals:
            if erased[msg.index - 1, t - 1]:
                lost_somewhere = True
            else:
                inbox[t]["public"].append(msg)
                ledger.terminals[t].add(msg.index)
        if channel.adversary_sees_erased or not lost_somewhere:
            ledger.adversary.add(msg.index)

    recovered, failures = {}, {}
    for t in cfg.terminals:
        masks = state.randomness.for_terminal(t)
        got = inbox[t]["deliveries"]
        slot = {d.index: i for i, d in enumerate(transcript.deliveries_for(t))}
        view = Transcript(transcript.params, transcript.mode, tuple(got), tuple(inbox[t]["public"]))
        ledger.terminals[t].update(d.index for d in got)
        if not cfg.receives(t):
            recovered[t], failures[t] = None, "withheld: helper received no deliveries"
            continue
        try:
            recovered[t] = reconstruct(t, [masks[slot[d.index]] for d in got], view)
        except (InsufficientShares, BadMask) as exc:
            recovered[t], failures[t] = None, f"{type(exc).__name__}: {exc}"
    return ProtocolResult(state.key, transcript, recovered, failures, cfg.helpers), ledger


@dataclass(frozen=True)
class TrialRow:
    seed: int
    erasure_rate: float
    redundancy: int
    recovered_terminals: int
    adversary_count: int
    safe: bool


def run_trials(cfg: ScenarioConfig, erasure_rate: float, redundancy: int, trials: int,
               seed: int = 0, adversary_sees_erased: bool = False) -> list[TrialRow]:
    """Seeded batch; trial i uses seed + i for both the dealer and the channel."""
    rows = []
    for i in range(trials):
        s = seed + i
        channel = ChannelModel(erasure_rate, adversary_sees_erased, redundancy, s)
        result, ledger = simulate_noisy_run(replace(cfg, seed=s), channel)
        ok = sum(1 for t, key in result.recovered.items()
                 if key is not None and key == result.dealer_key)
        report = safety_check(ledger, cfg.params.k)
        rows.append(TrialRow(s, erasure_rate, redundancy, ok, report.adversary_count, report.safe))
    return rows


def trials_csv(rows: list[TrialRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["seed", "erasure_rate", "redundancy", "recovered_terminals", "adversary_count", "safe"])
    for r in rows:
        w.writerow([r.seed, repr(r.erasure_rate), r.redundancy, r.recovered_terminals,
                    r.adversary_count, str(r.safe).lower()])
    if rows:
        w.writerow(["summary", repr(rows[0].erasure_rate), rows[0].redundancy,
                    sum(r.recovered_terminals for r in rows),
                    max(r.adversary_count for r in rows),
                    str(all(r.safe for r in rows)).lower()])
    return buf.getvalue()
