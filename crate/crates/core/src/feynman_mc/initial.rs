use crate::dyson::WavePacket;
use crate::scalar::{CVec3, Vec3};
use num_complex::Complex;

/// Initial state evaluated at complex points (entire in each variable).
pub trait InitialState: Sync {
    fn eval(&self, z: &CVec3<f64>) -> Complex<f64>;
}

impl InitialState for WavePacket<f64> {
    fn eval(&self, z: &CVec3<f64>) -> Complex<f64> {
        WavePacket::eval(self, z)
    }
}

/// `ψ(x) = amp·Π_d exp(−q_d(x_d − c_d)²/2 + i·p_d·x_d)`.
///
/// `q_d` may be complex (a chirp); `q_d = 0` makes the state constant
/// along that axis, so a packet with `q_3 = 0` is a genuinely planar state.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianPacket {
    pub amp: Complex<f64>,
    pub q: [Complex<f64>; 3],
    pub center: Vec3<f64>,
    pub momentum: Vec3<f64>,
}

impl GaussianPacket {
    /// Normalized (in the plane) isotropic packet of width `sigma` in
    /// `x₁, x₂`, constant in `x₃`.
    pub fn planar(sigma: f64, center: [f64; 2], momentum: [f64; 2]) -> Self {
        let q = Complex::new(1.0 / (sigma * sigma), 0.0);
        let amp = 1.0 / (std::f64::consts::PI.sqrt() * sigma);
        Self {
            amp: Complex::new(amp, 0.0),
            q: [q, q, Complex::new(0.0, 0.0)],
            center: [center[0], center[1], 0.0],
            momentum: [momentum[0], momentum[1], 0.0],
        }
    }

    /// Multiplies by `e^{i·g·|x_⊥|²/2}` in the plane (a chirp), i.e. adds
    /// `−i·g` to `q₁` and `q₂`.
    pub fn with_chirp(mut self, g: f64) -> Self {
        self.q[0] -= Complex::new(0.0, g);
        self.q[1] -= Complex::new(0.0, g);
        self
    }

    pub fn eval_real(&self, x: &Vec3<f64>) -> Complex<f64> {
        self.eval(&[Complex::from(x[0]), Complex::from(x[1]), Complex::from(x[2])])
    }
}

impl InitialState for GaussianPacket {
    fn eval(&self, z: &CVec3<f64>) -> Complex<f64> {
        let mut e = Complex::new(0.0, 0.0);
        for d in 0..3 {
            let u = z[d] - self.center[d];
            e += -self.q[d] * u * u * 0.5 + Complex::new(0.0, self.momentum[d]) * z[d];
        }
        self.amp * e.exp()
    }
}
