use crate::fourier_measure::PointMassMeasure;
use crate::scalar::{CVec3, Real, Vec3};
use num_complex::Complex;

/// State `ψ(x) = Σ w·e^{iy·x}` given by point masses in frequency space.
///
/// Point masses are not square integrable, so `norm_surrogate` is the
/// Euclidean norm of the weight vector.
#[derive(Clone, Debug, PartialEq)]
pub struct WavePacket<T: Real> {
    measure: PointMassMeasure<T>,
}

impl<T: Real> Default for WavePacket<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Real> WavePacket<T> {
    pub fn zero() -> Self {
        Self { measure: PointMassMeasure::empty() }
    }

    pub fn new(atoms: Vec<(Vec3<T>, Complex<T>)>) -> Self {
        Self { measure: PointMassMeasure::new(atoms) }
    }

    pub fn from_measure(measure: PointMassMeasure<T>) -> Self {
        Self { measure }
    }

    pub fn plane_wave(y: Vec3<T>) -> Self {
        Self::new(vec![(y, Complex::new(T::one(), T::zero()))])
    }

    pub fn measure(&self) -> &PointMassMeasure<T> {
        &self.measure
    }

    pub fn atoms(&self) -> &[(Vec3<T>, Complex<T>)] {
        self.measure.atoms()
    }

    pub fn support_radius(&self) -> T {
        self.measure.support_radius()
    }

    pub fn norm_surrogate(&self) -> T {
        self.atoms().iter().map(|(_, w)| w.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn eval(&self, z: &CVec3<T>) -> Complex<T> {
        self.measure.eval(z)
    }

    pub fn eval_real(&self, x: &Vec3<T>) -> Complex<T> {
        self.measure.eval_real(x)
    }

    /// `e^{−iħ|y|²s/2}` on every atom.
    pub fn apply_u0(&self, s: T, hbar: T) -> Self {
        self.apply_free(Complex::new(T::zero(), hbar / T::lit(2.0)), s)
    }

    /// `e^{−κ|y|²s}` on every atom; `κ = iħ/2` is the free Schrödinger
    /// propagator, real `κ > 0` the heat semigroup.
    pub fn apply_free(&self, kappa: Complex<T>, s: T) -> Self {
        let atoms = self
            .atoms()
            .iter()
            .map(|(y, w)| {
                let y2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
                (*y, *w * (-kappa * y2 * s).exp())
            })
            .collect();
        Self { measure: PointMassMeasure::with_radius(atoms, self.support_radius()).expect("same atoms") }
    }

    pub fn scaled(&self, s: Complex<T>) -> Self {
        Self { measure: self.measure.scaled(s) }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { measure: self.measure.add(&other.measure) }
    }

    /// Largest atom-wise weight difference after aligning frequencies.
    pub fn max_weight_diff(&self, other: &Self) -> T {
        let diff = self.add(&other.scaled(Complex::new(-T::one(), T::zero())));
        diff.atoms().iter().map(|(_, w)| w.norm()).fold(T::zero(), T::max)
    }
}
