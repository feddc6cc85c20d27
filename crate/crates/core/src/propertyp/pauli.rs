//! Pauli (two-component) orbitals of the Schrodinger operator and their
//! pairing with the relativistic shell they converge to.

use nalgebra::DVector;

use crate::angular::harmonics::{kappa_l, spinor_harmonic};
use crate::angular::{wigner_block, RotationSU2, C64};
use crate::error::{LabError, Result};
use crate::radial::{schrodinger_channel, solve_channel, Channel, RadialModel};

/// `phi(x) = u(r)/r sum_m c_m Omega_{kappa m}(x/|x|)`.
#[derive(Debug, Clone)]
pub struct PauliOrbital {
    pub kappa: i32,
    pub energy: f64,
    /// u and u' at the quadrature points, `∫u^2 dr = 1`
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    pub radii: Vec<f64>,
    /// coefficients over `tm = 2j, 2j-2, ..., -2j`
    pub coefficients: DVector<C64>,
}

impl PauliOrbital {
    pub fn two_j(&self) -> i32 {
        2 * self.kappa.abs() - 1
    }

    pub fn l(&self) -> i32 {
        kappa_l(self.kappa)
    }

    /// Single `m` state with `tm = 2m`.
    pub fn with_m(mut self, tm: i32) -> Result<Self> {
        let tj = self.two_j();
        if tm.abs() > tj || (tj - tm) % 2 != 0 {
            return Err(LabError::InvalidParameter(format!("2m = {tm} outside the j = {tj}/2 multiplet")));
        }
        self.coefficients = DVector::zeros((tj + 1) as usize);
        self.coefficients[((tj - tm) / 2) as usize] = C64::new(1.0, 0.0);
        Ok(self)
    }

    pub fn with_coefficients(mut self, c: DVector<C64>) -> Result<Self> {
        if c.len() != (self.two_j() + 1) as usize || c.norm() == 0.0 {
            return Err(LabError::InvalidParameter("coefficient vector does not fit the multiplet".into()));
        }
        let n = c.norm();
        self.coefficients = c / C64::new(n, 0.0);
        Ok(self)
    }

    /// `A•phi`: the Wigner block acts on the multiplet.
    pub fn rotated(&self, a: &RotationSU2) -> Self {
        let d = wigner_block(self.two_j(), a);
        Self { coefficients: d * &self.coefficients, ..self.clone() }
    }

    pub fn phased(&self, theta: f64) -> Self {
        Self { coefficients: &self.coefficients * C64::from_polar(1.0, theta), ..self.clone() }
    }

    /// Angular part `sum_m c_m Omega_{kappa m}`.
    pub fn angular(&self, theta: f64, phi: f64) -> [C64; 2] {
        let tj = self.two_j();
        let mut out = [C64::new(0.0, 0.0); 2];
        for (i, c) in self.coefficients.iter().enumerate() {
            if c.norm() == 0.0 {
                continue;
            }
            let om = spinor_harmonic(self.kappa, tj - 2 * i as i32, theta, phi);
            out[0] += om[0] * c;
            out[1] += om[1] * c;
        }
        out
    }

    pub fn value(&self, p: usize, theta: f64, phi: f64) -> [C64; 2] {
        let s = self.u[p] / self.radii[p];
        self.angular(theta, phi).map(|z| z * s)
    }

    /// `∫_{S^2} |phi|^2 (r w) dw` at quadrature point `p`.
    pub fn sphere_density(&self, p: usize) -> f64 {
        (self.u[p] / self.radii[p]).powi(2) * self.coefficients.norm_squared()
    }
}

#[derive(Debug, Clone)]
pub struct PairedOrbital {
    pub c: f64,
    pub channel: Channel,
    pub level: usize,
    /// relativistic shell energy minus c^2
    pub shifted: f64,
    pub pauli: PauliOrbital,
    /// `||(P, Q) - (u, (u' + kappa u/r)/2c)||`
    pub pairing_error: f64,
    /// `|∫ P u dr|`
    pub large_overlap: f64,
    /// `||Q - (u' + kappa u/r)/2c|| / ||Q||`
    pub small_error: f64,
}

/// Schrodinger orbital of channel `kappa`, bound level `level` (0-based),
/// in the `tm = 1` state (or the top of the multiplet).
pub fn pauli_orbital(model: &RadialModel, kappa: i32, level: usize) -> Result<PauliOrbital> {
    let channel = Channel::new(kappa)?;
    let states = schrodinger_channel(model, channel.l_large() as u32)?;
    let st = states
        .iter()
        .filter(|s| s.energy < 0.0)
        .nth(level)
        .ok_or_else(|| LabError::NoMatchingLevel(format!("no bound l={} level {level}", channel.l_large())))?;
    let tj = channel.two_j();
    let mut coefficients = DVector::zeros((tj + 1) as usize);
    coefficients[((tj - 1) / 2) as usize] = C64::new(1.0, 0.0);
    Ok(PauliOrbital {
        kappa,
        energy: st.energy,
        u: st.u.clone(),
        du: st.du.clone(),
        radii: model.grid.points().to_vec(),
        coefficients,
    })
}

pub fn pair_orbital(model: &RadialModel, kappa: i32, level: usize) -> Result<PairedOrbital> {
    let channel = Channel::new(kappa)?;
    let pauli = pauli_orbital(model, kappa, level)?;
    let rel = solve_channel(model, channel)?;
    let orb = rel
        .iter()
        .filter(|o| o.is_bound(model.c) && !o.spurious)
        .nth(level)
        .ok_or_else(|| LabError::NoMatchingLevel(format!("no relativistic level {level} in kappa={kappa}")))?;
    let grid = &model.grid;
    let r = grid.points();
    let c = model.c;
    let k = kappa as f64;
    let overlap = grid.integrate(&(0..r.len()).map(|i| orb.p[i] * pauli.u[i]).collect::<Vec<_>>());
    let sign = overlap.signum();
    let q_pair: Vec<f64> = (0..r.len()).map(|i| (pauli.du[i] + k * pauli.u[i] / r[i]) / (2.0 * c)).collect();
    let dp: Vec<f64> = (0..r.len()).map(|i| (sign * orb.p[i] - pauli.u[i]).powi(2)).collect();
    let dq: Vec<f64> = (0..r.len()).map(|i| (sign * orb.q[i] - q_pair[i]).powi(2)).collect();
    let qq: Vec<f64> = orb.q.iter().map(|v| v * v).collect();
    let (ep, eq) = (grid.integrate(&dp), grid.integrate(&dq));
    Ok(PairedOrbital {
        c,
        channel,
        level,
        shifted: orb.shifted,
        pauli,
        pairing_error: (ep + eq).sqrt(),
        large_overlap: overlap.abs(),
        small_error: (eq / grid.integrate(&qq)).sqrt(),
    })
}
