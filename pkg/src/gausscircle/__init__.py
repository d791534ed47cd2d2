"""Statistics of lattice points near circle boundaries.

Library layout:

* ``lattice``  -- enumeration and angular ordering of the annulus point set,
  polar coordinates, sector counts, neighbor-gap statistics.
* ``geometry`` -- exact unit-square/disc intersection areas, the tilted-square
  limit functional with its closed form and clipping oracle, the limiting
  variance constant.
* ``model``    -- the semi-infinite tilted rectangle model: its lattice
  points, transverse projections, model autocorrelations by seeded Monte
  Carlo, and the rectangle-vs-sector diagnostic.
* ``stats``    -- empirical estimators over one annulus: mean/variance of the
  boundary-square areas, autocorrelations, pair correlations in angular
  windows, windowed joint moments, distributional tests.
* ``spectral`` -- interval Fourier transforms, the sector-variance constant
  D(I) with a certified truncation tail, empirical sector variance, and
  narrow-sector count checks.
* ``cli``      -- reproducible command-line experiments (CSV/JSON output,
  golden-file verification).
"""

from .geometry import (
    a_inf,
    a_inf_many,
    a_inf_oracle,
    a_r_vs_a_inf_gap,
    area_disc_square,
    area_disc_square_many,
    c0_constant,
    cond_expectation,
)
from .intervals import IntervalSpec
from .lattice import (
    AnnulusPoint,
    GammaList,
    LatticePoint,
    NeighborStats,
    enumerate_gamma,
    gamma_to_csv,
    neighbor_stats,
    polar,
    sector_count,
)
from .model import (
    ModelPoint,
    ModelSequence,
    a_inf_k,
    model_ck,
    model_ck_batch,
    rect_approx_diagnostic,
    rect_points,
    rho_k,
)
from .spectral import (
    DTruncation,
    chi_hat,
    d_of_i,
    equidist_count_check,
    sector_variance_empirical,
)
from .stats import (
    AreaSeries,
    CorrelationEstimate,
    area_series,
    ck_average,
    empirical_ck,
    expectation_variance,
    limit_distribution_test,
    mixed_corr_sum,
    pair_corr_count,
    pair_joint_hist,
    windowed_joint_moments,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
