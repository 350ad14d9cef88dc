"""Monte Carlo experiments and sampled assumption checks. Every experiment takes a
problem (see `nsdde_milstein.builtin_problem`), draws its Brownian paths from
`(seed, path_index)` streams and returns a report whose `table` is a
`pandas.DataFrame`. Re-running with the same seed reproduces the report bit by bit,
for any number of workers. E.g.

```python
from nsdde_milstein import SchemeKind, builtin_problem
from nsdde_milstein.experiments import run_strong_convergence

report = run_strong_convergence(
    builtin_problem("linear-sdde"),
    schemes=[SchemeKind.TAMED_MILSTEIN],
    m_exponents=range(3, 9),
    ref_exponent=11,
    paths=1000,
)
```
"""

from ._acceptance import acceptance_check
from ._assumption_checker import (
    AssumptionReport,
    Violation,
    check_contraction,
    check_khasminskii,
    check_local_lipschitz,
    check_segment_holder,
    check_tamed_khasminskii,
    check_tamed_lipschitz,
    check_taming_gap,
    khasminskii_ladder,
    ladder_stabilises,
    report_frame,
    run_assumption_checks,
    violations_frame,
)
from ._exit_probability import ExitReport, estimate_exit_probability
from ._interpolation_gap import GapReport, estimate_interpolation_gap
from ._strong_convergence import (
    ConvergenceReport,
    estimate_order,
    run_strong_convergence,
)
from ._sup_moment import MomentReport, estimate_sup_moment
