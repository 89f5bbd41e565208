"""Built-in experiment configs, one per reference scenario."""

from typing import Dict, List

from src.errors import ConfigurationError

DEMOS: Dict[str, str] = {
    "w1_pair": """\
# Two 2-atom measures on the interval; W1 = 0.1
experiment = wasserstein

[measures]
space = interval
mu = 0.1:0.5, 0.9:0.5
nu = 0.3:0.5, 0.9:0.5
""",
    "ulam_doubling": """\
# Doubling map: one recurrent class, stationary vector uniform
experiment = ulam

[map]
family = doubling
space = circle

[grid]
n = 64
method = exact_pwl
""",
    "ulam_identity": """\
# Identity map: every cell is its own recurrent class
experiment = ulam

[map]
family = identity
space = interval

[grid]
n = 8
method = exact_pwl
""",
    "semicontinuity_doubling": """\
# Invariant measures of S = T + delta are nearly T-invariant
experiment = semicontinuity

[map]
family = doubling
space = circle

[perturbation]
kind = additive_constant

[grid]
n = 256
method = exact_pwl

[sweep]
deltas = 0.04, 0.02, 0.01
""",
    "continuity_rotation": """\
# Rotation by 1/2: period-2 measures stay far from the perturbed ones
experiment = continuity_probe

[map]
family = rotation
params = 0.5

[perturbation]
kind = additive_constant

[grid]
n = 64
method = exact_pwl
hull = true

[sweep]
deltas = 0.001, 0.0005, 0.00025
""",
    "continuity_doubling": """\
# Doubling map: both directed distances shrink with delta
experiment = continuity_probe

[map]
family = doubling

[perturbation]
kind = additive_constant

[grid]
n = 256
method = exact_pwl
hull = true

[sweep]
deltas = 0.04, 0.02, 0.01
""",
    "hausdorff_rotation": """\
# M(rotation 1/2) against M(rotation 1/2 + 1e-3)
experiment = hausdorff

[map]
family = rotation
params = 0.5

[perturbation]
kind = additive_constant
amplitude = 0.001

[grid]
n = 64
method = exact_pwl
hull = true
""",
    "birkhoff_golden": """\
# Cesaro averages of cos(2 pi x) along a golden-mean rotation orbit tend to 0
experiment = birkhoff

[map]
family = rotation
params = 0.6180339887498949

[orbit]
p = 0
phi = cos(1)
horizon = 10000
window = 0.25
""",
    "cesaro_doubling": """\
# Fixed point 0 of the doubling map continues to the fixed point 0.99 of S
experiment = cesaro_search

[map]
family = doubling

[perturbation]
kind = additive_constant
amplitude = 0.01

[search]
p = 0
phi = cos(1)
eps = 0.1
sigma = 0.05
horizon = 100000
candidates = 512
""",
    "visit_doubling": """\
# Visits to V = (-0.1, 0.1) mod 1 near the continued fixed point
experiment = visit_search

[map]
family = doubling

[perturbation]
kind = additive_constant
amplitude = 0.01

[search]
p = 0
eps = 0.1
sigma = 0.05
horizon = 100000
candidates = 512

[visit]
set = (-0.1, 0.1)
beta = 0.02

[bump]
alpha = 0.25
""",
    "lipschitz_doubling": """\
# One perturbation serves both 1-Lipschitz Fourier modes
experiment = lipschitz_sweep

[map]
family = doubling

[perturbation]
kind = additive_constant
amplitude = 0.01

[search]
p = 0
eps = 0.1
sigma = 0.05
horizon = 100000
candidates = 512

[lipschitz]
L = 1
family = 0.15915494309189535*cos(1); 0.15915494309189535*sin(1)
""",
}


def demo_names() -> List[str]:
    return sorted(DEMOS)


def demo_config(name: str) -> str:
    """
    Config text of a built-in demo.

    Raises:
        ConfigurationError: unknown demo name
    """
    try:
        return DEMOS[name]
    except KeyError:
        raise ConfigurationError(f"Unknown demo {name!r}. Available: {', '.join(demo_names())}") from None
