"""Wall-clock benchmarks and the linear-trend check on their results.

Rows follow the CSV schema ``bridge,param_n,ell,bits,reps,median_ms,p10_ms,p90_ms``.
Every size is timed at least ``MIN_BENCH_REPS`` times, and the trend fit refuses
rows recorded with fewer.
"""

import csv
import io
import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, TextIO, Union

import numpy as np
from scipy import stats

from bridgecraft import config
from bridgecraft.bridges.gentry import csgn_bridge_1, csgn_bridge_2, csgn_bridge_3, csgn_bridge_4
from bridgecraft.bridges.gm_syy import GmSyyBridge, compare_eval, gm_syy_bridge
from bridgecraft.errors import ParameterError
from bridgecraft.schemes.circuit import product_circuit
from bridgecraft.schemes.csgn import CsgnScheme, csgn_mul
from bridgecraft.schemes.gm import gm_enc
from bridgecraft.schemes.mockfhe import MockFheScheme
from bridgecraft.utils.streams import derive_rng

logger = logging.getLogger("bridgecraft.utils.bench")

CSV_FIELDS = ("bridge", "param_n", "ell", "bits", "reps", "median_ms", "p10_ms", "p90_ms")

# small enough for every CSGN bridge to run in milliseconds over the mock backend
BENCH_CSGN = (64, 8, 8)

MIN_TREND_POINTS = 3
MIN_BENCH_REPS = 10


def time_call(fn: Callable[[], object], reps: int) -> Dict[str, float]:
    """Run ``fn`` once to warm up, then ``reps`` timed times; return percentiles in ms."""
    if reps < 1:
        raise ParameterError(f"reps must be positive, got {reps}")
    fn()
    samples = []
    for _ in range(reps):
        start = time.perf_counter()
        fn()
        samples.append((time.perf_counter() - start) * 1000.0)
    p10, median, p90 = np.percentile(samples, [10, 50, 90])
    return {"median_ms": float(median), "p10_ms": float(p10), "p90_ms": float(p90)}


def _check_reps(reps: Optional[int]) -> int:
    reps = reps or config.BENCH_REPS
    if reps < MIN_BENCH_REPS:
        raise ParameterError(f"benchmarks need at least {MIN_BENCH_REPS} repetitions per size, got {reps}")
    return reps


def bench_compare(
    sizes: Sequence[int],
    reps: Optional[int] = None,
    bits: Optional[int] = None,
    ell: Optional[int] = None,
    seed: int = 0,
    fixed_primes: Optional[tuple] = None,
) -> List[Dict[str, object]]:
    """Time the encrypted equality test on equal n-bit vectors for each n in ``sizes``."""
    reps = _check_reps(reps)
    bits = bits or config.GM_BITS
    ell = ell or config.SYY_ELL
    bridge = gm_syy_bridge(bits, ell, fixed_primes=fixed_primes)
    material = bridge.keygen3(derive_rng(seed, "bench", "keys"))
    keys = GmSyyBridge.from_material(material)

    rows = []
    for n in sizes:
        rng = derive_rng(seed, "bench", "compare", n)
        x = [rng.getrandbits(1) for _ in range(n)]
        cs = [gm_enc(keys.gm_pk, b, rng) for b in x]
        ds = [gm_enc(keys.gm_pk, b, rng) for b in x]
        timing = time_call(lambda: compare_eval(keys, cs, ds, rng), reps)
        rows.append({"bridge": "gm-syy", "param_n": n, "ell": ell, "bits": bits, "reps": reps, **timing})
        logger.info(f"compare n={n}: median {timing['median_ms']:.2f} ms")
    return rows


MONOMIAL_BRIDGES = ("csgn-1", "csgn-2", "csgn-3", "csgn-4", "direct-mock")


def _csgn_bridge(name: str, source: CsgnScheme):
    if name == "csgn-1":
        return csgn_bridge_1(source, MockFheScheme(2))
    if name == "csgn-2":
        return csgn_bridge_2(source, MockFheScheme(2))
    if name == "csgn-3":
        return csgn_bridge_3(source)
    return csgn_bridge_4(source, MockFheScheme(2))


def bench_monomial(
    name: str,
    degrees: Sequence[int],
    reps: Optional[int] = None,
    seed: int = 0,
    csgn_params: Sequence[int] = BENCH_CSGN,
) -> List[Dict[str, object]]:
    """Degree-k monomials: CSGN products then one bridge call, or directly in the mock target."""
    if name not in MONOMIAL_BRIDGES:
        raise ParameterError(f"unknown monomial benchmark {name!r}; choose from {MONOMIAL_BRIDGES}")
    reps = _check_reps(reps)
    rows = []

    if name == "direct-mock":
        target = MockFheScheme(2)
        keys = target.keygen(derive_rng(seed, "bench", "keys"))
        for k in degrees:
            rng = derive_rng(seed, "bench", name, k)
            inputs = [target.enc(keys.pk, 1, rng) for _ in range(k)]
            circuit = product_circuit(k)
            timing = time_call(lambda: target.eval(keys.evk, circuit, inputs, rng), reps)
            rows.append({"bridge": name, "param_n": k, "ell": "", "bits": "", "reps": reps, **timing})
        return rows

    n, d, s = csgn_params
    source = CsgnScheme(n, d, s)
    bridge = _csgn_bridge(name, source)
    material = bridge.keygen3(derive_rng(seed, "bench", "keys"))
    public = material.public
    for k in degrees:
        rng = derive_rng(seed, "bench", name, k)
        factors = [source.enc(material.pk1, 1, rng) for _ in range(k)]

        def run() -> object:
            acc = factors[0]
            for c in factors[1:]:
                acc = csgn_mul(acc, c)
            return bridge.map_f(public, acc, rng)

        timing = time_call(run, reps)
        rows.append({"bridge": name, "param_n": k, "ell": "", "bits": "", "reps": reps, **timing})
    logger.info(f"Benchmarked {name} at degrees {list(degrees)}")
    return rows


def write_csv(rows: Sequence[Dict[str, object]], out: Union[str, Path, TextIO, None] = None) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: row.get(k, "") for k in CSV_FIELDS})
    text = buffer.getvalue()
    if isinstance(out, (str, Path)):
        Path(out).write_text(text)
    elif out is not None:
        out.write(text)
    return text


def read_csv(source: Union[str, Path, TextIO]) -> List[Dict[str, str]]:
    if isinstance(source, (str, Path)):
        with open(source, newline="") as f:
            return list(csv.DictReader(f))
    return list(csv.DictReader(source))


@dataclass(frozen=True)
class TrendReport:
    bridge: str
    points: int
    slope: float
    intercept: float
    r_squared: float

    def to_dict(self) -> Dict[str, object]:
        return {
            "bridge": self.bridge,
            "points": self.points,
            "slope_ms_per_n": self.slope,
            "intercept_ms": self.intercept,
            "r_squared": self.r_squared,
        }


def bench_trend(rows: Union[str, Path, TextIO, Sequence[Dict[str, object]]]) -> TrendReport:
    """Least-squares fit of median time against n."""
    if isinstance(rows, (str, Path)) or hasattr(rows, "read"):
        rows = read_csv(rows)
    if not rows:
        raise ParameterError("benchmark data is empty")
    names = {str(r["bridge"]) for r in rows}
    if len(names) != 1:
        raise ParameterError(f"trend needs rows from one benchmark, got {sorted(names)}")
    try:
        reps = [int(r["reps"]) for r in rows]
        x = np.array([float(r["param_n"]) for r in rows])
        y = np.array([float(r["median_ms"]) for r in rows])
    except (KeyError, ValueError) as e:
        raise ParameterError(f"malformed benchmark rows: {e}")
    if min(reps) < MIN_BENCH_REPS:
        raise ParameterError(f"rows timed with {min(reps)} repetitions; the trend needs at least {MIN_BENCH_REPS}")
    if len(np.unique(x)) < MIN_TREND_POINTS:
        raise ParameterError(f"trend needs at least {MIN_TREND_POINTS} distinct sizes, got {len(np.unique(x))}")

    if np.ptp(y) == 0:
        # linregress leaves r undefined on constant data
        return TrendReport(names.pop(), len(x), 0.0, float(y[0]), 0.0)
    fit = stats.linregress(x, y)
    return TrendReport(names.pop(), len(x), float(fit.slope), float(fit.intercept), float(fit.rvalue ** 2))
