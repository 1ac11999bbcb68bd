use statrs::distribution::{ContinuousCDF, FisherSnedecor};

/// Upper-tail probability `P(F > f_stat)` of the F distribution.
pub fn f_pvalue(f_stat: f64, df1: f64, df2: f64) -> f64 {
    if f_stat.is_nan() {
        return f64::NAN;
    }
    if f_stat <= 0.0 {
        return 1.0;
    }
    if f_stat.is_infinite() {
        return 0.0;
    }
    let dist = FisherSnedecor::new(df1, df2).expect("degrees of freedom must be positive");
    dist.sf(f_stat).clamp(0.0, 1.0)
}
