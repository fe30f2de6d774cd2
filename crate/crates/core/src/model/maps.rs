use crate::linalg::Mat2;
use crate::model::{angle_diff, wrap_angle, CylinderPoint, ModelParams, Perturbation};
use crate::{Error, Result};

/// Central finite-difference step used wherever an analytic derivative is
/// not available.
pub const FD_STEP: f64 = 1e-6;

/// Higher-order terms `S₁, S₂` of the local map near `O₁` and `R₁, R₂` near
/// `O₂`. Implementations should vanish with the radial variable like
/// `y^{δ₁+σ}`; the default is identically zero.
pub trait Remainders {
    fn s1(&self, _x: f64, _y: f64, _lambda: f64) -> f64 {
        0.0
    }
    fn s2(&self, _x: f64, _y: f64, _lambda: f64) -> f64 {
        0.0
    }
    fn r1(&self, _r: f64, _phi: f64, _lambda: f64) -> f64 {
        0.0
    }
    fn r2(&self, _r: f64, _phi: f64, _lambda: f64) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroRemainders;

impl Remainders for ZeroRemainders {}

/// Passage near `O₁`: a point of `In⁺(O₁)` leaves through `Out(O₁)` at
/// polar coordinates `(r, φ) = (y^{δ₁}, x − (ω₁/E₁) ln y)`.
pub fn local_map_o1(p: CylinderPoint, params: &ModelParams) -> Result<(f64, f64)> {
    local_map_o1_with(p, params, &ZeroRemainders)
}

pub fn local_map_o1_with(
    p: CylinderPoint,
    params: &ModelParams,
    rem: &dyn Remainders,
) -> Result<(f64, f64)> {
    if !(p.y > 0.0) {
        return Err(Error::Domain { map: "local map at O1 (trapped or wrong branch)", x: p.x, y: p.y });
    }
    let o1 = params.o1();
    let lambda = params.lambda();
    let r = p.y.powf(params.derived().delta1) + rem.s1(p.x, p.y, lambda);
    let phi = p.x - o1.frequency / o1.expansion * p.y.ln() + rem.s2(p.x, p.y, lambda);
    Ok((r, wrap_angle(phi)))
}

/// Passage near `O₂`: `(r, φ) ↦ (φ − (ω₂/E₂) ln r, r^{δ₂})`.
pub fn local_map_o2(r: f64, phi: f64, params: &ModelParams) -> Result<CylinderPoint> {
    local_map_o2_with(r, phi, params, &ZeroRemainders)
}

pub fn local_map_o2_with(
    r: f64,
    phi: f64,
    params: &ModelParams,
    rem: &dyn Remainders,
) -> Result<CylinderPoint> {
    if !(r > 0.0) {
        return Err(Error::Domain { map: "local map at O2 (hits the stable manifold)", x: phi, y: r });
    }
    let o2 = params.o2();
    let lambda = params.lambda();
    let x = phi - o2.frequency / o2.expansion * r.ln() + rem.r1(r, phi, lambda);
    let y = r.powf(params.derived().delta2) + rem.r2(r, phi, lambda);
    Ok(CylinderPoint::new(x, y))
}

/// `η = L₂ ∘ Ψ₁→₂ ∘ L₁` in closed form: `(x − K_ω ln y, y^δ)`.
pub fn eta(p: CylinderPoint, params: &ModelParams) -> Result<CylinderPoint> {
    if !(p.y > 0.0) {
        return Err(Error::Domain { map: "eta (entered lower branch or trapped)", x: p.x, y: p.y });
    }
    let d = params.derived();
    Ok(CylinderPoint::new(p.x - d.k_omega * p.y.ln(), p.y.powf(d.delta)))
}

/// Global transition `Out(O₂) → In(O₁)`:
/// `(x + ξ + λΦ₁(x, y), y + λΦ₂(x, y))`.
pub fn psi_21(p: CylinderPoint, params: &ModelParams, pert: &Perturbation) -> CylinderPoint {
    let lambda = params.lambda();
    CylinderPoint::new(
        p.x + params.xi() + lambda * pert.phi1(p.x, p.y),
        p.y + lambda * pert.phi2(p.x, p.y),
    )
}

/// Which map a Jacobian or evaluation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    Eta,
    Psi21,
    Return,
    /// Return map in the coordinates `(x, ȳ) = (x, y/λ)`.
    Rescaled,
}

/// The first return map `𝓕_λ = η ∘ Ψ₂→₁` for fixed parameters and perturbation.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnMap {
    params: ModelParams,
    pert: Perturbation,
}

impl ReturnMap {
    pub fn new(params: ModelParams, pert: Perturbation) -> Self {
        Self { params, pert }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn perturbation(&self) -> &Perturbation {
        &self.pert
    }

    pub fn with_params(&self, params: ModelParams) -> Self {
        Self { params, pert: self.pert.clone() }
    }

    /// Height fed into `η`: `y + λΦ₂(x, y)`. The point is in the return
    /// domain iff this is positive.
    pub fn entry_height(&self, p: CylinderPoint) -> f64 {
        p.y + self.params.lambda() * self.pert.phi2(p.x, p.y)
    }

    /// One application of the return map together with the lift displacement
    /// `x̂' − x̂` of the angle.
    pub fn step_with_displacement(&self, p: CylinderPoint) -> Result<(CylinderPoint, f64)> {
        let lambda = self.params.lambda();
        let d = self.params.derived();
        let big_y = p.y + lambda * self.pert.phi2(p.x, p.y);
        if !(big_y > 0.0) {
            return Err(Error::Escape(p));
        }
        let shift = self.params.xi() + lambda * self.pert.phi1(p.x, p.y) - d.k_omega * big_y.ln();
        Ok((CylinderPoint::new(p.x + shift, big_y.powf(d.delta)), shift))
    }

    pub fn apply(&self, p: CylinderPoint) -> Result<CylinderPoint> {
        self.step_with_displacement(p).map(|(q, _)| q)
    }

    /// The return map in rescaled coordinates `ȳ = y/λ`.
    pub fn apply_rescaled(&self, x: f64, ybar: f64) -> Result<(f64, f64)> {
        let lambda = self.params.lambda();
        if !(lambda > 0.0) {
            return Err(Error::Precondition(
                "rescaled coordinates need lambda > 0 (the change of coordinates is singular at 0)".into(),
            ));
        }
        let d = self.params.derived();
        let y = lambda * ybar;
        let inner = ybar + self.pert.phi2(x, y);
        if !(inner > 0.0) {
            return Err(Error::Escape(CylinderPoint::new(x, y)));
        }
        let x1 = x + self.params.xi() + lambda * self.pert.phi1(x, y)
            - d.k_omega * lambda.ln()
            - d.k_omega * inner.ln();
        let y1 = lambda.powf(d.delta - 1.0) * inner.powf(d.delta);
        Ok((wrap_angle(x1), y1))
    }

    /// Evaluates the chosen map at `(x, y)`; for [`MapKind::Rescaled`] the
    /// second coordinate is `ȳ`.
    pub fn evaluate(&self, kind: MapKind, x: f64, y: f64) -> Result<(f64, f64)> {
        let p = CylinderPoint { x, y };
        match kind {
            MapKind::Eta => eta(p, &self.params).map(|q| (q.x, q.y)),
            MapKind::Psi21 => {
                let q = psi_21(p, &self.params, &self.pert);
                Ok((q.x, q.y))
            }
            MapKind::Return => self.apply(p).map(|q| (q.x, q.y)),
            MapKind::Rescaled => self.apply_rescaled(x, y),
        }
    }

    fn psi_jacobian(&self, x: f64, y: f64) -> Mat2 {
        let lambda = self.params.lambda();
        let (f1, f2) = (self.pert.phi1_field(), self.pert.phi2_field());
        Mat2::new(
            1.0 + lambda * f1.dx(x, y),
            lambda * f1.dy(x, y),
            lambda * f2.dx(x, y),
            1.0 + lambda * f2.dy(x, y),
        )
    }

    fn eta_jacobian(&self, big_y: f64) -> Result<Mat2> {
        if !(big_y > 0.0) {
            return Err(Error::Domain { map: "eta jacobian", x: f64::NAN, y: big_y });
        }
        let d = self.params.derived();
        Ok(Mat2::new(1.0, -d.k_omega / big_y, 0.0, d.delta * big_y.powf(d.delta - 1.0)))
    }

    /// Analytic Jacobian of the chosen map.
    pub fn jacobian(&self, kind: MapKind, x: f64, y: f64) -> Result<Mat2> {
        match kind {
            MapKind::Eta => self.eta_jacobian(y),
            MapKind::Psi21 => Ok(self.psi_jacobian(x, y)),
            MapKind::Return => {
                let big_y = self.entry_height(CylinderPoint { x, y });
                if !(big_y > 0.0) {
                    return Err(Error::Escape(CylinderPoint::new(x, y)));
                }
                Ok(self.eta_jacobian(big_y)? * self.psi_jacobian(x, y))
            }
            MapKind::Rescaled => {
                let lambda = self.params.lambda();
                if !(lambda > 0.0) {
                    return Err(Error::Precondition("rescaled jacobian needs lambda > 0".into()));
                }
                let m = self.jacobian(MapKind::Return, x, lambda * y)?;
                Ok(Mat2::new(m.a, m.b * lambda, m.c / lambda, m.d))
            }
        }
    }

    /// Central-difference Jacobian; the angle component is unwrapped.
    pub fn fd_jacobian(&self, kind: MapKind, x: f64, y: f64, h: f64) -> Result<Mat2> {
        let (xp, yp) = self.evaluate(kind, x + h, y)?;
        let (xm, ym) = self.evaluate(kind, x - h, y)?;
        let (xu, yu) = self.evaluate(kind, x, y + h)?;
        let (xd, yd) = self.evaluate(kind, x, y - h)?;
        let two_h = 2.0 * h;
        Ok(Mat2::new(
            angle_diff(xp, xm) / two_h,
            angle_diff(xu, xd) / two_h,
            (yp - ym) / two_h,
            (yu - yd) / two_h,
        ))
    }

    /// `det D𝓕_λ(x, y) = δ Y^{δ−1} · det DΨ₂→₁(x, y)` with `Y = y + λΦ₂`.
    pub fn det_factorized(&self, x: f64, y: f64) -> Result<f64> {
        let big_y = self.entry_height(CylinderPoint { x, y });
        if !(big_y > 0.0) {
            return Err(Error::Escape(CylinderPoint::new(x, y)));
        }
        let d = self.params.derived();
        Ok(d.delta * big_y.powf(d.delta - 1.0) * self.psi_jacobian(x, y).det())
    }
}
