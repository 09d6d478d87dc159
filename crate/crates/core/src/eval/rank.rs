use crate::error::{Error, Result};
use crate::num::{from_f64, from_usize};
use crate::Scalar;

/// 1-based ranks with ties sharing the mean of the positions they span.
pub fn average_ranks<T: Scalar>(xs: &[T]) -> Result<Vec<T>> {
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::UndefinedCorrelation("non-finite input"));
    }
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).expect("finite values are ordered"));
    let mut ranks = vec![T::zero(); xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && xs[order[j]] == xs[order[i]] {
            j += 1;
        }
        // positions i+1 ..= j
        let rank = from_usize::<T>(i + 1 + j) / from_f64(2.0);
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        i = j;
    }
    Ok(ranks)
}

/// Spearman's rank correlation: Pearson correlation of average ranks.
///
/// Errors when the inputs differ in length, have fewer than two elements, or
/// either side is constant.
pub fn spearman<T: Scalar>(xs: &[T], ys: &[T]) -> Result<T> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(Error::UndefinedCorrelation("fewer than two observations"));
    }
    let rx = average_ranks(xs)?;
    let ry = average_ranks(ys)?;
    pearson(&rx, &ry)
}

pub(crate) fn pearson<T: Scalar>(xs: &[T], ys: &[T]) -> Result<T> {
    let n = from_usize::<T>(xs.len());
    let mx = xs.iter().copied().sum::<T>() / n;
    let my = ys.iter().copied().sum::<T>() / n;
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy = sxy + dx * dy;
        sxx = sxx + dx * dx;
        syy = syy + dy * dy;
    }
    if sxx == T::zero() || syy == T::zero() {
        return Err(Error::UndefinedCorrelation("constant input"));
    }
    let r = sxy / (sxx * syy).sqrt();
    Ok(r.max(-T::one()).min(T::one()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn perfect_agreement_and_reversal() {
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]).unwrap(), 1.0);
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
    }

    #[test]
    fn ties_get_average_ranks() {
        assert_eq!(average_ranks(&[1.0, 2.0, 2.0, 4.0]).unwrap(), vec![1.0, 2.5, 2.5, 4.0]);
        assert_eq!(average_ranks(&[5.0, 5.0, 5.0]).unwrap(), vec![2.0, 2.0, 2.0]);
        // ranks (1, 2.5, 2.5, 4) vs (1, 3, 2, 4): sxy = 4.5, sxx = 4.5, syy = 5
        let r: f64 = spearman(&[1.0, 2.0, 2.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        approx::assert_abs_diff_eq!(r, 4.5 / (4.5f64 * 5.0).sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn undefined_cases() {
        assert!(matches!(spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), Err(Error::UndefinedCorrelation(_))));
        assert!(matches!(spearman(&[1.0, 2.0], &[4.0, 4.0]), Err(Error::UndefinedCorrelation(_))));
        assert!(matches!(spearman(&[1.0], &[1.0]), Err(Error::UndefinedCorrelation(_))));
        assert!(matches!(spearman(&[1.0, 2.0], &[1.0]), Err(Error::LengthMismatch(2, 1))));
        assert!(spearman(&[1.0, f64::NAN], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn works_in_f32() {
        assert_eq!(spearman(&[0.1f32, 0.5, 0.3], &[1.0, 3.0, 2.0]).unwrap(), 1.0);
    }

    proptest! {
        #[test]
        fn invariant_under_increasing_transform(
            pairs in prop::collection::vec((-50i32..50, -50i32..50), 3..40)
        ) {
            let xs: Vec<f64> = pairs.iter().map(|p| p.0 as f64).collect();
            let ys: Vec<f64> = pairs.iter().map(|p| p.1 as f64).collect();
            prop_assume!(xs.iter().any(|&x| x != xs[0]) && ys.iter().any(|&y| y != ys[0]));
            let r = spearman(&xs, &ys).unwrap();
            let tx: Vec<f64> = xs.iter().map(|x| (x / 10.0).exp() + 3.0 * x).collect();
            let ty: Vec<f64> = ys.iter().map(|y| y * y * y).collect();
            prop_assert_eq!(spearman(&tx, &ty).unwrap(), r);
            prop_assert!((-1.0..=1.0).contains(&r));
        }

        #[test]
        fn symmetric(xs in prop::collection::vec(0u8..5, 4..30), ys in prop::collection::vec(0u8..5, 4..30)) {
            let n = xs.len().min(ys.len());
            let xs: Vec<f64> = xs[..n].iter().map(|&v| v as f64).collect();
            let ys: Vec<f64> = ys[..n].iter().map(|&v| v as f64).collect();
            if let (Ok(a), Ok(b)) = (spearman(&xs, &ys), spearman(&ys, &xs)) {
                prop_assert_eq!(a, b);
            }
        }
    }
}
