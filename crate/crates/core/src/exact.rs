use num_rational::Ratio;

/// Exact rational used for conductance values and their comparisons.
pub type Rational = Ratio<i128>;

/// Correctly rounded whenever numerator and denominator are below 2^53.
pub fn ratio_to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}
