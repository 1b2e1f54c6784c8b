//! Stationary impact law of the locally linear order book.
//!
//! The latent volume density grows linearly away from the mid price and
//! saturates at `rho_inf` beyond a width `u_star`:
//!
//! ```text
//! rho(u) = rho_inf * (1 - exp(-u / u_star))
//! V(dp)  = rho_inf * (dp - u_star * (1 - exp(-dp / u_star)))
//! ```
//!
//! `V` is the volume that has to be consumed to move the price by `dp`. Its
//! inverse is the price impact of trading a volume `v` within one day. For
//! small volumes it reduces to the square-root law `sqrt(2 v u_star / rho_inf)`,
//! for large volumes to the linear law `v / rho_inf + u_star`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Business days per year used to turn annual volatilities into daily ones.
pub const DEFAULT_DAY_COUNT: f64 = 252.0;

const MAX_NEWTON_ITERS: usize = 200;

/// Converts an annualized volatility into a daily one, `vol / sqrt(day_count)`.
pub fn daily_volatility<T: Scalar>(vol_annual: T, day_count: T) -> T {
    vol_annual / day_count.sqrt()
}

/// `alpha_inf` such that a par bond sized at one ADV is optimally liquidated
/// in exactly one day in the small-size limit: `6 / gamma^2`.
pub fn calibrated_alpha_inf<T: Scalar>(gamma: T) -> Result<T> {
    if !(gamma > T::zero()) || !gamma.is_finite() {
        return Err(Error::domain(
            "gamma",
            "positive and finite",
            gamma.as_f64(),
        ));
    }
    Ok(T::lit(6.0) / (gamma * gamma))
}

/// Per-asset parameters of the impact law.
///
/// `rho_inf = alpha_inf * adv / sigma_daily` and `u_star = sigma_daily` are
/// computed on construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpactParams<T> {
    adv: T,
    sigma_daily: T,
    alpha_inf: T,
    rho_inf: T,
    u_star: T,
}

impl<T: Scalar> ImpactParams<T> {
    pub fn new(adv: T, sigma_daily: T, alpha_inf: T) -> Result<Self> {
        positive("adv", adv)?;
        positive("sigma_daily", sigma_daily)?;
        positive("alpha_inf", alpha_inf)?;
        Ok(Self {
            adv,
            sigma_daily,
            alpha_inf,
            rho_inf: alpha_inf * adv / sigma_daily,
            u_star: sigma_daily,
        })
    }

    /// Impact law implied by the microscopic order flow rates.
    ///
    /// There is no ADV or volatility behind these rates, so the result is
    /// expressed with `sigma_daily = u_star`, `alpha_inf = 1` and
    /// `adv = rho_inf * u_star`, which reproduces the same density.
    pub fn from_pde(pde: &PdeParams<T>) -> Self {
        let rho_inf = pde.rho_inf();
        let u_star = pde.u_star();
        Self {
            adv: rho_inf * u_star,
            sigma_daily: u_star,
            alpha_inf: T::one(),
            rho_inf,
            u_star,
        }
    }

    pub fn adv(&self) -> T {
        self.adv
    }

    pub fn sigma_daily(&self) -> T {
        self.sigma_daily
    }

    pub fn alpha_inf(&self) -> T {
        self.alpha_inf
    }

    pub fn rho_inf(&self) -> T {
        self.rho_inf
    }

    pub fn u_star(&self) -> T {
        self.u_star
    }

    /// Price move per unit volume for trades small against ADV, `sigma / adv`.
    pub fn epsilon_naive(&self) -> T {
        self.sigma_daily / self.adv
    }

    /// Price move per unit volume deep in the book, `1 / rho_inf`.
    pub fn epsilon_asympt(&self) -> T {
        self.rho_inf.recip()
    }

    /// Latent volume density at distance `u` from the mid price.
    pub fn stationary_density(&self, u: T) -> Result<T> {
        non_negative("u", u)?;
        Ok(self.density_unchecked(u))
    }

    /// Volume consumed by a price move of `delta_p`.
    pub fn volume_at_impact(&self, delta_p: T) -> Result<T> {
        non_negative("delta_p", delta_p)?;
        Ok(self.volume_unchecked(delta_p))
    }

    /// Price move caused by trading `v` in one day, the inverse of
    /// [`volume_at_impact`](Self::volume_at_impact).
    ///
    /// Safeguarded Newton on `V(w) = v`, seeded at the square-root law and kept
    /// inside `[max(sqrt(2 v u*/rho), v/rho), v/rho + u*]`, which always
    /// brackets the root since `rho (w - u*) <= V(w) <= min(rho w, rho w^2 / 2u*)`.
    pub fn impact_at_volume(&self, v: T) -> Result<T> {
        non_negative("v", v)?;
        if v == T::zero() {
            return Ok(T::zero());
        }
        if v.is_infinite() {
            return Ok(v);
        }

        let rho = self.rho_inf;
        let u = self.u_star;
        let rel_tol = T::lit(1e-12).max(T::epsilon() * T::lit(8.0));
        let abs_tol = T::lit(1e-14).max(T::epsilon()) * u;

        let linear = v / rho;
        let mut hi = linear + u;
        let mut lo = self.small_size_unchecked(v).max(linear).min(hi);
        let mut w = lo;

        for _ in 0..MAX_NEWTON_ITERS {
            let g = self.volume_unchecked(w) - v;
            if g == T::zero() {
                return Ok(w);
            }
            if g < T::zero() {
                lo = lo.max(w);
            } else {
                hi = hi.min(w);
            }

            let slope = self.density_unchecked(w);
            let newton = w - g / slope;
            let next = if newton.is_finite() && newton > lo && newton < hi {
                newton
            } else {
                T::lit(0.5) * (lo + hi)
            };

            let step = (next - w).abs();
            w = next;
            if step <= rel_tol * w || step <= abs_tol || hi - lo <= rel_tol * w {
                return Ok(w);
            }
        }

        Err(Error::NoConvergence {
            iterations: MAX_NEWTON_ITERS,
            volume: v.as_f64(),
        })
    }

    /// Square-root law `sqrt(2 v u* / rho_inf)`, valid for `v << rho_inf u*`.
    pub fn impact_small_size(&self, v: T) -> Result<T> {
        non_negative("v", v)?;
        Ok(self.small_size_unchecked(v))
    }

    #[inline]
    pub(crate) fn density_unchecked(&self, u: T) -> T {
        -self.rho_inf * (-u / self.u_star).exp_m1()
    }

    #[inline]
    pub(crate) fn volume_unchecked(&self, delta_p: T) -> T {
        self.rho_inf * self.u_star * excess_over_linear(delta_p / self.u_star)
    }

    #[inline]
    fn small_size_unchecked(&self, v: T) -> T {
        (T::lit(2.0) * v * self.u_star / self.rho_inf).sqrt()
    }
}

/// `x - (1 - exp(-x))` without cancellation for small `x`.
fn excess_over_linear<T: Scalar>(x: T) -> T {
    if x < T::lit(0.5) {
        // x^2/2! - x^3/3! + x^4/4! - ...
        let mut term = x * x * T::lit(0.5);
        let mut sum = term;
        let mut k = 2.0;
        loop {
            k += 1.0;
            term = -term * x / T::lit(k);
            sum += term;
            if term.abs() <= T::epsilon() * sum.abs() || k > 40.0 {
                break;
            }
        }
        sum
    } else {
        x + (-x).exp_m1()
    }
}

/// Rates of the latent order flow: deposition `lambda`, cancellation `nu_inf`
/// and the diffusion constant `d_coeff` (revision variance plus price variance).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdeParams<T> {
    lambda_rate: T,
    nu_inf: T,
    d_coeff: T,
}

impl<T: Scalar> PdeParams<T> {
    pub fn new(lambda_rate: T, nu_inf: T, d_coeff: T) -> Result<Self> {
        positive("lambda_rate", lambda_rate)?;
        positive("nu_inf", nu_inf)?;
        positive("d_coeff", d_coeff)?;
        Ok(Self {
            lambda_rate,
            nu_inf,
            d_coeff,
        })
    }

    pub fn lambda_rate(&self) -> T {
        self.lambda_rate
    }

    pub fn nu_inf(&self) -> T {
        self.nu_inf
    }

    pub fn d_coeff(&self) -> T {
        self.d_coeff
    }

    pub fn rho_inf(&self) -> T {
        self.lambda_rate / self.nu_inf
    }

    pub fn u_star(&self) -> T {
        (self.d_coeff / (T::lit(2.0) * self.nu_inf)).sqrt()
    }
}

/// Max-norm residual of the closed-form density against the stationary
/// equation `D/2 rho'' - nu_inf rho + lambda = 0` with `rho(0) = 0`.
///
/// See [`stationary_residual`] for the discretization.
pub fn verify_stationary_pde<T: Scalar>(
    pde: &PdeParams<T>,
    grid_size: usize,
    domain_width: T,
) -> Result<T> {
    let impact = ImpactParams::from_pde(pde);
    stationary_residual(pde, grid_size, domain_width, |u| {
        impact.density_unchecked(u)
    })
}

/// Residual of an arbitrary density profile against the stationary equation.
///
/// `grid_size` points are spread uniformly over `[0, domain_width]`. Interior
/// points use the second-order central difference for `rho''`; the first point
/// contributes `nu_inf * |rho(0)|`, the violation of the absorbing boundary
/// expressed in the same units as the interior residual.
pub fn stationary_residual<T, F>(
    pde: &PdeParams<T>,
    grid_size: usize,
    domain_width: T,
    density: F,
) -> Result<T>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    if grid_size < 16 {
        return Err(Error::domain("grid_size", "at least 16", grid_size as f64));
    }
    if !(domain_width >= T::lit(10.0) * pde.u_star()) || !domain_width.is_finite() {
        return Err(Error::domain(
            "domain_width",
            "at least 10 u_star",
            domain_width.as_f64(),
        ));
    }

    let h = domain_width / T::from_count(grid_size - 1);
    let rho: Vec<T> = (0..grid_size)
        .map(|k| density(h * T::from_count(k)))
        .collect();

    let half_d = T::lit(0.5) * pde.d_coeff;
    let h2 = h * h;
    let interior = rho.windows(3).map(|w| {
        let second = (w[2] - T::lit(2.0) * w[1] + w[0]) / h2;
        (half_d * second - pde.nu_inf * w[1] + pde.lambda_rate).abs()
    });
    let boundary = (pde.nu_inf * rho[0]).abs();

    Ok(interior.fold(boundary, T::max))
}

fn positive<T: Scalar>(what: &'static str, x: T) -> Result<()> {
    if x > T::zero() && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(what, "positive and finite", x.as_f64()))
    }
}

fn non_negative<T: Scalar>(what: &'static str, x: T) -> Result<()> {
    if x >= T::zero() {
        Ok(())
    } else {
        Err(Error::domain(what, "non-negative", x.as_f64()))
    }
}
