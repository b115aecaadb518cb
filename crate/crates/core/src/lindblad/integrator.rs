use nalgebra::Matrix2;
use num_complex::Complex64;

use super::pulse::{sample_count, PulseSequence, PulseSpec};
use super::{LindbladError, TimeTrace};
use crate::Carrier;

const TRACE_TOL: f64 = 1e-9;
const EIGEN_TOL: f64 = 1e-9;

/// 2×2 density matrix in the basis (ground, excited).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix(pub Matrix2<Complex64>);

impl DensityMatrix {
    pub fn ground() -> Self {
        Self(Matrix2::new(
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ))
    }

    pub fn excited() -> Self {
        Self(Matrix2::new(
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ))
    }

    pub fn ground_population(&self) -> f64 {
        self.0[(0, 0)].re
    }

    pub fn excited_population(&self) -> f64 {
        self.0[(1, 1)].re
    }

    /// ⟨σ⁻⟩ = Tr(ρ σ⁻) = ρ_eg.
    pub fn sigma_minus(&self) -> Complex64 {
        self.0[(1, 0)]
    }

    /// Bloch vector (⟨σ_x⟩, ⟨σ_y⟩, ⟨σ_z⟩) with σ_z = |e⟩⟨e| − |g⟩⟨g|.
    pub fn bloch(&self) -> (f64, f64, f64) {
        let c = self.sigma_minus();
        (
            2.0 * c.re,
            -2.0 * c.im,
            self.excited_population() - self.ground_population(),
        )
    }

    pub fn trace(&self) -> Complex64 {
        self.0[(0, 0)] + self.0[(1, 1)]
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let a = self.0[(0, 0)].re;
        let d = self.0[(1, 1)].re;
        let b = 0.5 * (self.0[(0, 1)] + self.0[(1, 0)].conj());
        0.5 * (a + d - ((a - d).powi(2) + 4.0 * b.norm_sqr()).sqrt())
    }

    fn check(&self, t: f64) -> Result<(), LindbladError> {
        let fail = |detail: String| Err(LindbladError::NonPhysicalState { t, detail });
        let m = &self.0;
        if !m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return fail("non-finite density matrix".into());
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return fail(format!("trace {tr} deviates from 1"));
        }
        let herm = (m[(0, 1)] - m[(1, 0)].conj()).norm() + m[(0, 0)].im.abs() + m[(1, 1)].im.abs();
        if herm > TRACE_TOL {
            return fail(format!("hermiticity defect {herm:e}"));
        }
        let lmin = self.min_eigenvalue();
        if lmin < -EIGEN_TOL {
            return fail(format!("negative eigenvalue {lmin:e}"));
        }
        Ok(())
    }
}

/// Bichromatic RWA Hamiltonian (ħ = 1). The ground–excited element is
/// `c₊ e^{−iδω t} + c₋ e^{+iδω t}` for couplings `c₋`, `c₊` in rad/s; the
/// diagonal is zero.
pub fn rwa_hamiltonian(
    omega_minus: f64,
    omega_plus: f64,
    detuning: f64,
    t: f64,
) -> Matrix2<Complex64> {
    let rot = Complex64::from_polar(1.0, detuning * t);
    let h = omega_plus * rot.conj() + omega_minus * rot;
    let zero = Complex64::new(0.0, 0.0);
    Matrix2::new(zero, h, h.conj(), zero)
}

fn lindblad_rhs(h: &Matrix2<Complex64>, rho: &Matrix2<Complex64>, gamma: f64) -> Matrix2<Complex64> {
    let i = Complex64::new(0.0, 1.0);
    let mut out = (h * rho - rho * h) * (-i);
    let pe = rho[(1, 1)] * gamma;
    out[(0, 0)] += pe;
    out[(1, 1)] -= pe;
    out[(0, 1)] -= rho[(0, 1)] * (0.5 * gamma);
    out[(1, 0)] -= rho[(1, 0)] * (0.5 * gamma);
    out
}

/// Starting state of an evolution. The ground state is the physical choice;
/// the others exist for tests.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitialState {
    Ground,
    Excited,
    Custom(DensityMatrix),
}

/// Integration settings: the trace is recorded every `dt` over `[0, t_end)`
/// and each recording interval is covered by `substeps` RK4 steps (further
/// split at envelope edges).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolveOptions {
    pub dt: f64,
    pub t_end: f64,
    pub substeps: usize,
    pub initial: InitialState,
}

impl EvolveOptions {
    pub fn new(dt: f64, t_end: f64) -> Self {
        Self {
            dt,
            t_end,
            substeps: 1,
            initial: InitialState::Ground,
        }
    }

    pub fn substeps(mut self, substeps: usize) -> Self {
        self.substeps = substeps;
        self
    }

    pub fn initial(mut self, initial: InitialState) -> Self {
        self.initial = initial;
        self
    }
}

/// Pulses active on one integration segment, evaluated from their analytic
/// shapes so that the segment end points see the interior limit.
struct Segment<'a> {
    active: Vec<(&'a PulseSpec, f64)>,
}

impl<'a> Segment<'a> {
    fn at(seq: &'a PulseSequence, mid: f64) -> Self {
        let k = (mid / seq.repetition_period).floor();
        let offset = k * seq.repetition_period;
        let local = mid - offset;
        let active = seq
            .pulses
            .iter()
            .filter(|p| p.start <= local && local < p.end())
            .map(|p| (p, offset))
            .collect();
        Self { active }
    }

    fn couplings(&self, t: f64) -> (f64, f64) {
        let mut out = (0.0, 0.0);
        for (p, offset) in &self.active {
            let half = 0.5 * p.shape(t - offset);
            match p.carrier {
                Carrier::Minus => out.0 += half,
                Carrier::Plus => out.1 += half,
            }
        }
        out
    }
}

struct Stepper<'a> {
    seq: &'a PulseSequence,
    breakpoints: Vec<f64>,
    next_break: usize,
    substeps: usize,
}

impl Stepper<'_> {
    fn hamiltonian(&self, seg: &Segment<'_>, t: f64) -> Matrix2<Complex64> {
        let (cm, cp) = seg.couplings(t);
        rwa_hamiltonian(cm, cp, self.seq.detuning, t)
    }

    fn rk4(&self, seg: &Segment<'_>, rho: &mut Matrix2<Complex64>, t: f64, h: f64) {
        let g = self.seq.gamma1;
        let h0 = self.hamiltonian(seg, t);
        let hm = self.hamiltonian(seg, t + 0.5 * h);
        let h1 = self.hamiltonian(seg, t + h);
        let k1 = lindblad_rhs(&h0, rho, g);
        let half = Complex64::new(0.5 * h, 0.0);
        let full = Complex64::new(h, 0.0);
        let k2 = lindblad_rhs(&hm, &(*rho + k1 * half), g);
        let k3 = lindblad_rhs(&hm, &(*rho + k2 * half), g);
        let k4 = lindblad_rhs(&h1, &(*rho + k3 * full), g);
        *rho += (k1 + (k2 + k3) * Complex64::new(2.0, 0.0) + k4) * Complex64::new(h / 6.0, 0.0);
    }

    fn free_decay(&self, rho: &mut Matrix2<Complex64>, h: f64) {
        let g = self.seq.gamma1;
        let pop = (-g * h).exp();
        let coh = (-0.5 * g * h).exp();
        let moved = rho[(1, 1)] * (1.0 - pop);
        rho[(1, 1)] *= pop;
        rho[(0, 0)] += moved;
        rho[(0, 1)] *= coh;
        rho[(1, 0)] *= coh;
    }

    fn segment(&self, rho: &mut Matrix2<Complex64>, u: f64, v: f64) {
        if v <= u {
            return;
        }
        let seg = Segment::at(self.seq, 0.5 * (u + v));
        if seg.active.is_empty() {
            self.free_decay(rho, v - u);
            return;
        }
        let h = (v - u) / self.substeps as f64;
        for k in 0..self.substeps {
            self.rk4(&seg, rho, u + k as f64 * h, h);
        }
    }

    fn advance(&mut self, rho: &mut Matrix2<Complex64>, a: f64, b: f64) {
        while self.next_break < self.breakpoints.len() && self.breakpoints[self.next_break] <= a {
            self.next_break += 1;
        }
        let mut u = a;
        while self.next_break < self.breakpoints.len() && self.breakpoints[self.next_break] < b {
            let edge = self.breakpoints[self.next_break];
            self.segment(rho, u, edge);
            u = edge;
            self.next_break += 1;
        }
        self.segment(rho, u, b);
    }
}

/// Integrates the master equation and hands the state at every recording time
/// `t_j = j·dt` (before the step from `t_j`) to `observer`. Returns the state
/// at `t_end`.
pub fn evolve_observed<F: FnMut(f64, &DensityMatrix)>(
    seq: &PulseSequence,
    opts: &EvolveOptions,
    mut observer: F,
) -> Result<DensityMatrix, LindbladError> {
    let n = sample_count(opts.dt, opts.t_end)?;
    if opts.substeps == 0 {
        return Err(LindbladError::BadGrid {
            dt: opts.dt,
            window: opts.t_end,
        });
    }
    let step = opts.dt / opts.substeps as f64;
    let mut limit = f64::INFINITY;
    let peak = seq.peak_rabi();
    if peak > 0.0 {
        limit = limit.min(1.0 / (20.0 * peak));
    }
    if seq.detuning > 0.0 {
        limit = limit.min(1.0 / (20.0 * seq.detuning));
    }
    if step > limit {
        return Err(LindbladError::StepTooLarge { step, limit });
    }
    let mut rho = match opts.initial {
        InitialState::Ground => DensityMatrix::ground(),
        InitialState::Excited => DensityMatrix::excited(),
        InitialState::Custom(r) => r,
    };
    rho.check(0.0)?;
    let mut stepper = Stepper {
        seq,
        breakpoints: seq.breakpoints(opts.t_end),
        next_break: 0,
        substeps: opts.substeps,
    };
    for j in 0..n {
        let t = j as f64 * opts.dt;
        rho.check(t)?;
        observer(t, &rho);
        let t_next = if j + 1 == n {
            opts.t_end
        } else {
            (j + 1) as f64 * opts.dt
        };
        stepper.advance(&mut rho.0, t, t_next);
    }
    rho.check(opts.t_end)?;
    Ok(rho)
}

/// Records ⟨σ⁻(t)⟩ with the options' step, substeps and initial state.
pub fn evolve_with(seq: &PulseSequence, opts: &EvolveOptions) -> Result<TimeTrace, LindbladError> {
    let mut samples = Vec::with_capacity((opts.t_end / opts.dt).round().max(0.0) as usize);
    evolve_observed(seq, opts, |_, rho| samples.push(rho.sigma_minus()))?;
    TimeTrace::new(0.0, opts.dt, samples)
}

/// Evolves from the ground state with one RK4 step per sample and records
/// ⟨σ⁻(t)⟩ on `[0, t_end)`.
pub fn evolve(seq: &PulseSequence, dt: f64, t_end: f64) -> Result<TimeTrace, LindbladError> {
    evolve_with(seq, &EvolveOptions::new(dt, t_end))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dissipator_is_traceless_and_hermitian() {
        let rho = Matrix2::new(
            Complex64::new(0.3, 0.0),
            Complex64::new(0.1, 0.2),
            Complex64::new(0.1, -0.2),
            Complex64::new(0.7, 0.0),
        );
        let h = rwa_hamiltonian(1.3, 0.4, 2.0, 0.7);
        let d = lindblad_rhs(&h, &rho, 0.9);
        assert!((d[(0, 0)] + d[(1, 1)]).norm() < 1e-15);
        assert!((d[(0, 1)] - d[(1, 0)].conj()).norm() < 1e-15);
    }

    #[test]
    fn free_decay_matches_rk4() {
        let seq = PulseSequence::new(vec![], 0.0, 2.0, 10.0).unwrap();
        let stepper = Stepper {
            seq: &seq,
            breakpoints: vec![],
            next_break: 0,
            substeps: 1,
        };
        let seg = Segment { active: vec![] };
        let start = Matrix2::new(
            Complex64::new(0.4, 0.0),
            Complex64::new(0.2, 0.1),
            Complex64::new(0.2, -0.1),
            Complex64::new(0.6, 0.0),
        );
        let mut exact = start;
        stepper.free_decay(&mut exact, 0.5);
        let mut num = start;
        for k in 0..500 {
            stepper.rk4(&seg, &mut num, k as f64 * 1e-3, 1e-3);
        }
        assert!((exact - num).norm() < 1e-12);
    }
}
