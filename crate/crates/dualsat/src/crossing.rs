/// Smallest power at which curve `a - b` changes sign, by linear interpolation
/// within the bracketing interval. Exact zeros between opposite signs count as
/// the crossing; curves that touch without changing sign do not cross.
pub fn find_crossing(powers: &[f64], a: &[f64], b: &[f64]) -> Option<f64> {
    let n = powers.len().min(a.len()).min(b.len());
    let mut last: Option<(usize, f64)> = None;
    for i in 0..n {
        let d = a[i] - b[i];
        if d == 0.0 || d.is_nan() {
            continue;
        }
        if let Some((j, dj)) = last {
            if dj.signum() != d.signum() {
                if j + 1 == i {
                    return Some(powers[j] + (powers[i] - powers[j]) * dj / (dj - d));
                }
                return Some(powers[j + 1]);
            }
        }
        last = Some((i, d));
    }
    None
}
