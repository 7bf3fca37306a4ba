"""Monte-Carlo simulation of iterative product-code decoding.

A product code frame is an n x n ternary matrix; rows and columns are
alternately decoded by the component decoder and exchange extrinsic (EMP)
or intrinsic (IMP) messages. EMP replaces the target position with the
channel value before decoding; without erasures all n extrinsic words of a
constraint equal the plain word wherever message and channel agree, so one
decode plus one decode per disagreeing position suffices (the deterministic
fast path). With erasures present the component decoder is randomized, so
every position is decoded separately with independent fills.

All-zero-codeword transmission is the default; the randomized fill makes
the decoder statistics codeword independent, which the encode-and-transmit
validation mode checks empirically. Per-frame RNG streams are derived from
(seed, frame index, purpose), so runs parallelize reproducibly.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .batchdec import SyndromeLut, eaed_batch, eaed_plus_batch, pack_rows, unpack_words
from .bch import ComponentCodeSpec, encode
from .channel import ChannelParams, simulate_symbols
from .ternary import ERASE


@dataclass
class SimConfig:
    spec: ComponentCodeSpec
    decoder: str = "eaed"  # "eaed" | "eaedplus"
    schedule: str = "emp"  # "emp" | "imp"
    iterations: int = 20
    t_quant: float = 0.0
    target_ber: float = 1e-4
    confidence: float = 0.95
    max_bits: float = 1e9  # per-probe trial cap
    min_frames: int = 32
    seed: int = 0
    allzero: bool = True
    practical_final: bool = False  # footnote rule: random only when both erased
    jobs: int = 1

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not 0.0 < self.target_ber < 1.0:
            raise ValueError("target_ber must be in (0, 1)")
        if self.spec.n > 63:
            raise ValueError(
                "Monte-Carlo simulation is implemented for component codes up "
                "to n = 63 (lookup-table decoding); longer codes are analysis-only"
            )


@dataclass
class ProductCodeState:
    channel: np.ndarray  # quantized received values r, (n, n) ternary
    plane_rc: np.ndarray  # messages row-CN -> VN
    plane_cr: np.ndarray  # messages col-CN -> VN
    iteration: int = 0


def init_state(channel_matrix: np.ndarray) -> ProductCodeState:
    return ProductCodeState(
        channel=channel_matrix,
        plane_rc=channel_matrix.copy(),
        plane_cr=channel_matrix.copy(),
    )


def _pack_ternary(words: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return pack_rows((words == 1).astype(np.uint8)), pack_rows((words == 2).astype(np.uint8))


def _component_batch(lut, decoder, val, er, rng):
    if decoder == "eaed":
        return eaed_batch(lut, val, er, rng)
    return eaed_plus_batch(lut, val, er)


def _to_ternary(val: np.ndarray, er: np.ndarray, n: int) -> np.ndarray:
    out = unpack_words(val, n).astype(np.int8)
    out[unpack_words(er, n) == 1] = ERASE
    return out


def _cn_update_emp(
    lut: SyndromeLut,
    decoder: str,
    msgs: np.ndarray,
    chan: np.ndarray,
    rng: np.random.Generator,
) -> np.ndarray:
    """Extrinsic update of all CNs of one plane; returns (m, n) ternary."""
    n = lut.n
    mval, mer = _pack_ternary(msgs)
    cval, cer = _pack_ternary(chan)
    out = np.empty_like(msgs)

    clean = (mer == 0) & (cer == 0)
    if np.any(clean):
        rows = np.flatnonzero(clean)
        dec, ok = lut.decode(mval[rows])
        base = unpack_words(np.where(ok, dec, mval[rows]), n).astype(np.int8)
        out[rows] = base
        # positions where the channel replacement changes the word
        diff = unpack_words(mval[rows] ^ cval[rows], n)
        ri, ki = np.nonzero(diff)
        if ri.size:
            bit = np.uint64(1) << ki.astype(np.uint64)
            vwords = (mval[rows][ri] & ~bit) | (cval[rows][ri] & bit)
            vdec, vok = lut.decode(vwords)
            res = np.where(vok, vdec, vwords)
            out[rows[ri], ki] = ((res >> ki.astype(np.uint64)) & np.uint64(1)).astype(np.int8)

    dirty = np.flatnonzero(~clean)
    if dirty.size:
        # one extrinsic word per position, each with its own random fill
        ks = np.arange(n, dtype=np.uint64)
        bit = np.uint64(1) << ks
        vv = (mval[dirty, None] & ~bit) | (cval[dirty, None] & bit)
        ve = (mer[dirty, None] & ~bit) | (cer[dirty, None] & bit)
        rv, re = _component_batch(lut, decoder, vv.ravel(), ve.ravel(), rng)
        rv = rv.reshape(dirty.size, n)
        re = re.reshape(dirty.size, n)
        sym = ((rv >> ks) & np.uint64(1)).astype(np.int8)
        sym[((re >> ks) & np.uint64(1)) == 1] = ERASE
        out[dirty] = sym
    return out


def _cn_update_imp(
    lut: SyndromeLut, decoder: str, msgs: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    mval, mer = _pack_ternary(msgs)
    rv, re = _component_batch(lut, decoder, mval, mer, rng)
    return _to_ternary(rv, re, lut.n)


def _expected_ber(plane_rc: np.ndarray, plane_cr: np.ndarray, tx: np.ndarray) -> float:
    def err(plane):
        wrong = (plane != tx) & (plane != ERASE)
        return wrong + 0.5 * (plane == ERASE)

    return float(0.5 * (err(plane_rc) + err(plane_cr)).mean())


def final_decision(
    plane_rc: np.ndarray, plane_cr: np.ndarray, rng: np.random.Generator,
    practical: bool = False,
) -> np.ndarray:
    """Pick one incoming message per VN at random; erasures become coin flips.

    With ``practical`` set, an erased message defers to the unerased one and
    only double erasures are random (the rule real decoders use).
    """
    choice = rng.integers(0, 2, size=plane_rc.shape, dtype=np.int8)
    fills = rng.integers(0, 2, size=plane_rc.shape, dtype=np.int8)
    if practical:
        chosen = np.where(choice == 0, plane_rc, plane_cr)
        chosen = np.where((plane_rc == ERASE) & (plane_cr != ERASE), plane_cr, chosen)
        chosen = np.where((plane_cr == ERASE) & (plane_rc != ERASE), plane_rc, chosen)
    else:
        chosen = np.where(choice == 0, plane_rc, plane_cr)
    return np.where(chosen == ERASE, fills, chosen).astype(np.uint8)


def decode_product(
    state: ProductCodeState,
    config: SimConfig,
    rng_dec: np.random.Generator,
    rng_final: np.random.Generator,
    tx: np.ndarray | None = None,
    lut: SyndromeLut | None = None,
) -> tuple[np.ndarray, list[float]]:
    """Run the iterative decoder; returns (decided bits, expected-BER trace)."""
    lut = lut or SyndromeLut(config.spec)
    n = config.spec.n
    if tx is None:
        tx = np.zeros((n, n), dtype=np.int8)
    trace = []
    for _ in range(config.iterations):
        # row CNs read what VNs forwarded from the column side
        if config.schedule == "emp":
            state.plane_rc = _cn_update_emp(
                lut, config.decoder, state.plane_cr, state.channel, rng_dec
            )
            state.plane_cr = _cn_update_emp(
                lut, config.decoder, state.plane_rc.T.copy(), state.channel.T.copy(), rng_dec
            ).T
        elif config.schedule == "imp":
            state.plane_rc = _cn_update_imp(lut, config.decoder, state.plane_cr, rng_dec)
            state.plane_cr = _cn_update_imp(
                lut, config.decoder, state.plane_rc.T.copy(), rng_dec
            ).T
        else:
            raise ValueError(f"unknown schedule {config.schedule!r}")
        state.iteration += 1
        trace.append(_expected_ber(state.plane_rc, state.plane_cr, tx))
    bits = final_decision(state.plane_rc, state.plane_cr, rng_final, config.practical_final)
    return bits, trace


def random_product_codeword(spec: ComponentCodeSpec, rng: np.random.Generator) -> np.ndarray:
    """Systematic random product codeword (rows and columns all codewords)."""
    n, k = spec.n, spec.k
    msg = rng.integers(0, 2, size=(k, k), dtype=np.uint8)
    rows = np.stack([encode(spec, m) for m in msg])  # (k, n)
    return np.stack([encode(spec, col) for col in rows.T]).T.astype(np.uint8)


def _frame_rngs(seed: int, index: int):
    mk = lambda tag: np.random.default_rng([seed, index, tag])
    return mk(0), mk(1), mk(2)  # channel, decoder, final decision


def simulate_frame(
    config: SimConfig, es_n0: float, index: int, lut: SyndromeLut | None = None
) -> tuple[int, list[float]]:
    """Transmit one frame and decode; returns (bit errors, BER trace)."""
    rng_ch, rng_dec, rng_final = _frame_rngs(config.seed, index)
    n = config.spec.n
    if config.allzero:
        tx = np.zeros((n, n), dtype=np.int8)
    else:
        tx = random_product_codeword(config.spec, rng_ch).astype(np.int8)
    chan = simulate_symbols(ChannelParams(es_n0, config.t_quant), tx, rng_ch)
    bits, trace = decode_product(init_state(chan), config, rng_dec, rng_final, tx=tx, lut=lut)
    return int((bits != tx).sum()), trace


def wilson_interval(errors: int, trials: int, confidence: float) -> tuple[float, float]:
    from scipy.stats import norm

    z = norm.ppf(0.5 + confidence / 2.0)
    p = errors / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(center - half, 0.0), min(center + half, 1.0)


@dataclass
class BerEstimate:
    es_n0_db_point: float
    ber: float
    ci_lo: float
    ci_hi: float
    frames: int
    bit_errors: int
    bits: int
    separated: bool  # interval excludes the target BER

    def as_dict(self) -> dict:
        return dict(self.__dict__)


_WORKER_STATE: dict = {}


def _worker_init(spec):
    _WORKER_STATE["lut"] = SyndromeLut(spec)


def _worker_frames(args) -> int:
    config, es_n0, lo, hi = args
    lut = _WORKER_STATE.get("lut") or SyndromeLut(config.spec)
    return sum(simulate_frame(config, es_n0, i, lut)[0] for i in range(lo, hi))


def estimate_ber(config: SimConfig, es_n0: float, es_n0_db: float | None = None) -> BerEstimate:
    """Monte-Carlo BER with a Wilson interval; trials adapt until the
    interval excludes the target BER or the bit budget is exhausted."""
    n = config.spec.n
    bits_per_frame = n * n
    max_frames = max(int(config.max_bits // bits_per_frame), config.min_frames)
    errors = 0
    frames = 0
    lut = SyndromeLut(config.spec) if config.jobs == 1 else None
    pool = (
        ProcessPoolExecutor(config.jobs, initializer=_worker_init, initargs=(config.spec,))
        if config.jobs > 1
        else None
    )
    try:
        chunk = config.min_frames
        while frames < max_frames:
            todo = min(chunk, max_frames - frames)
            if pool is None:
                errors += sum(
                    simulate_frame(config, es_n0, i, lut)[0]
                    for i in range(frames, frames + todo)
                )
            else:
                per = max(todo // config.jobs, 1)
                tasks = [
                    (config, es_n0, lo, min(lo + per, frames + todo))
                    for lo in range(frames, frames + todo, per)
                ]
                errors += sum(pool.map(_worker_frames, tasks))
            frames += todo
            lo, hi = wilson_interval(errors, frames * bits_per_frame, config.confidence)
            if hi < config.target_ber or lo > config.target_ber:
                break
            chunk = min(chunk * 2, 4096)
    finally:
        if pool is not None:
            pool.shutdown()
    bits = frames * bits_per_frame
    lo, hi = wilson_interval(errors, bits, config.confidence)
    separated = hi < config.target_ber or lo > config.target_ber
    return BerEstimate(
        es_n0_db_point=es_n0_db if es_n0_db is not None else 10 * math.log10(es_n0),
        ber=errors / bits,
        ci_lo=lo,
        ci_hi=hi,
        frames=frames,
        bit_errors=errors,
        bits=bits,
        separated=separated,
    )


def simulated_threshold(
    config: SimConfig,
    bracket_db: tuple[float, float],
    tol_db: float = 0.01,
) -> dict:
    """Binary search for the Es/N0 where BER crosses the target.

    Each probe simulates until its Wilson interval excludes the target (or
    the budget runs out, which flags the result); the residual search
    interval is the reported error bar.
    """
    from .channel import db_to_lin

    lo, hi = bracket_db
    probes = []
    flagged = False

    def above_target(esn0_db: float) -> bool:
        nonlocal flagged
        est = estimate_ber(config, db_to_lin(esn0_db), esn0_db)
        probes.append(est.as_dict())
        if not est.separated:
            flagged = True
        return est.ber > config.target_ber

    if not above_target(lo):
        raise ValueError(f"bracket low {lo} dB already below target BER")
    if above_target(hi):
        raise ValueError(f"bracket high {hi} dB still above target BER")
    while hi - lo > tol_db:
        mid = 0.5 * (lo + hi)
        if above_target(mid):
            lo = mid
        else:
            hi = mid
    return {
        "esn0_starstar_db": 0.5 * (lo + hi),
        "interval_lo_db": lo,
        "interval_hi_db": hi,
        "flagged": flagged,
        "probes": probes,
    }


# ---------------------------------------------------------------------------
# reference binary pipeline (plain iterative BDD, no erasure machinery)
# ---------------------------------------------------------------------------


def decode_product_bdd_reference(
    channel_matrix: np.ndarray,
    spec: ComponentCodeSpec,
    iterations: int,
    rng_final: np.random.Generator,
) -> np.ndarray:
    """Classical iterative BDD product decoding with EMP, binary alphabet.

    Independent straight-line implementation used to check that the ternary
    pipeline collapses to plain HDD at T = 0: same schedule, same final
    decision discipline, no erasure handling anywhere.
    """
    lut = SyndromeLut(spec)
    n = spec.n
    chan = channel_matrix.astype(np.int8)
    plane_rc = chan.copy()
    plane_cr = chan.copy()

    def update(msgs: np.ndarray, chan_words: np.ndarray) -> np.ndarray:
        out = np.empty_like(msgs)
        mval = pack_rows(msgs.astype(np.uint8))
        cval = pack_rows(chan_words.astype(np.uint8))
        dec, ok = lut.decode(mval)
        out[:] = unpack_words(np.where(ok, dec, mval), n).astype(np.int8)
        ri, ki = np.nonzero(unpack_words(mval ^ cval, n))
        if ri.size:
            bit = np.uint64(1) << ki.astype(np.uint64)
            vwords = (mval[ri] & ~bit) | (cval[ri] & bit)
            vdec, vok = lut.decode(vwords)
            res = np.where(vok, vdec, vwords)
            out[ri, ki] = ((res >> ki.astype(np.uint64)) & np.uint64(1)).astype(np.int8)
        return out

    for _ in range(iterations):
        plane_rc = update(plane_cr, chan)
        plane_cr = update(plane_rc.T.copy(), chan.T.copy()).T
    return final_decision(plane_rc, plane_cr, rng_final)
