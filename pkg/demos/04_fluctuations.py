"""Disorder fluctuations of the even/odd response gap across box sizes.

Two regimes, one honest lesson:

* with a pure (undiluted) ring between inner box and frame, the gap variance
  grows like the ring size: boundary-proportional, exactly what the pathwise
  annulus cap allows;
* with 50 percent dilution everywhere the ring sits below the site
  percolation threshold, the boundary signal is cut off exponentially in the
  moat width, and the variance decays outright.

Neither regime produces variance proportional to the inner-box volume.
"""
import numpy as np

from hardcore2d import (
    DisorderSpec,
    ReplicaSeed,
    box_lambda,
    fluctuation_scaling,
    response_gap,
    sample_field,
)

LAM = 4.0
REPS = 200
spec = DisorderSpec.bernoulli(0.5)

print(f"disorder everywhere ({spec.label()}, scale {LAM}), outer half-side 2j:")
rows = fluctuation_scaling((1, 2, 3), LAM, spec, REPS, seed=2026)
for r in rows:
    print(f"  j={r.j}: var={r.variance:.4e}  var/volume={r.variance_per_site:.4e}")
print("  -> the volume-normalized ratio decays: the diluted moat cuts the signal")

print()
print("disorder only inside the inner box, pure moat:")
for j in (1, 2, 3):
    L = 2 * j
    region = box_lambda(L).expand(1)
    gaps = np.empty(REPS)
    for rep in range(REPS):
        pure = sample_field(DisorderSpec.constant(1.0), region, LAM, ReplicaSeed(2026, rep))
        inner = sample_field(spec, box_lambda(j), LAM, ReplicaSeed(2026, rep))
        gaps[rep] = response_gap(L, box_lambda(j), pure.patched(inner, box_lambda(j)))
    var = gaps.var(ddof=1)
    ring = box_lambda(j + 1).site_count - box_lambda(j).site_count
    print(f"  j={j}: var={var:.4e}  var/ring={var / ring:.4e}")
print("  -> var/ring is flat: boundary-proportional growth, not volume growth")
