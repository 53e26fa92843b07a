//! Linear models over one-hot encoded categoricals and standardized
//! numericals: ridge regression (closed form) and L2-penalized logistic
//! regression fit by damped Newton steps from a zero start.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::table::{ColumnKind, DataTable};

use super::argmax_tie_lowest;

/// Cholesky factorization with escalating diagonal jitter. Plain
/// factorization is attempted first so well-conditioned systems are solved
/// exactly; jitter only enters for (near-)singular matrices.
pub(crate) fn cholesky_with_jitter(a: &DMatrix<f64>) -> Option<Cholesky<f64, Dyn>> {
    if let Some(chol) = Cholesky::new(a.clone()) {
        return Some(chol);
    }
    let n = a.nrows();
    let scale = (0..n).map(|i| a[(i, i)].abs()).fold(0.0, f64::max).max(1.0);
    let mut jitter = 1e-12;
    while jitter <= 1e-2 {
        let mut ja = a.clone();
        for i in 0..n {
            ja[(i, i)] += jitter * scale;
        }
        if let Some(chol) = Cholesky::new(ja) {
            return Some(chol);
        }
        jitter *= 100.0;
    }
    None
}

#[derive(Debug, Clone, PartialEq)]
enum EncodedField {
    Numerical { col: usize, mean: f64, sd: f64 },
    OneHot { col: usize, level: u32 },
}

/// Feature encoding: numerical columns standardized with training-row
/// statistics, categorical columns expanded to full one-hot blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct Encoding {
    fields: Vec<EncodedField>,
}

impl Encoding {
    pub fn fit(table: &DataTable, rows: &[usize], cols: &[usize]) -> Encoding {
        let mut fields = Vec::new();
        for &c in cols {
            match &table.schema()[c].kind {
                ColumnKind::Numerical { .. } => {
                    let n = rows.len() as f64;
                    let sum: f64 = rows
                        .iter()
                        .map(|&r| table.num(r, c).expect("complete features"))
                        .sum();
                    let mean = sum / n;
                    let var: f64 = rows
                        .iter()
                        .map(|&r| {
                            let d = table.num(r, c).expect("complete features") - mean;
                            d * d
                        })
                        .sum::<f64>()
                        / n;
                    let sd = if var.sqrt() < 1e-12 { 1.0 } else { var.sqrt() };
                    fields.push(EncodedField::Numerical { col: c, mean, sd });
                }
                ColumnKind::Categorical { levels } => {
                    for level in 0..levels.len() as u32 {
                        fields.push(EncodedField::OneHot { col: c, level });
                    }
                }
            }
        }
        Encoding { fields }
    }

    pub fn width(&self) -> usize {
        self.fields.len()
    }

    pub fn encode_into(&self, table: &DataTable, row: usize, out: &mut [f64]) {
        for (i, field) in self.fields.iter().enumerate() {
            out[i] = match field {
                EncodedField::Numerical { col, mean, sd } => {
                    (table.num(row, *col).expect("complete features") - mean) / sd
                }
                EncodedField::OneHot { col, level } => {
                    if table.cat(row, *col).expect("complete features") == *level {
                        1.0
                    } else {
                        0.0
                    }
                }
            };
        }
    }

    /// Design matrix for the given rows with a trailing intercept column.
    fn design(&self, table: &DataTable, rows: &[usize]) -> DMatrix<f64> {
        let d = self.width();
        let mut x = DMatrix::zeros(rows.len(), d + 1);
        let mut buf = vec![0.0; d];
        for (i, &r) in rows.iter().enumerate() {
            self.encode_into(table, r, &mut buf);
            for (j, &v) in buf.iter().enumerate() {
                x[(i, j)] = v;
            }
            x[(i, d)] = 1.0;
        }
        x
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub encoding: Encoding,
    pub weights: Vec<f64>,
    pub intercept: f64,
}

impl LinearModel {
    pub fn decision(&self, table: &DataTable, row: usize) -> f64 {
        let mut buf = vec![0.0; self.encoding.width()];
        self.encoding.encode_into(table, row, &mut buf);
        self.intercept
            + buf
                .iter()
                .zip(&self.weights)
                .map(|(x, w)| x * w)
                .sum::<f64>()
    }
}

pub type RidgeModel = LinearModel;

/// Closed-form ridge regression (intercept unpenalized) of `y` on the encoded
/// predictor columns over `rows`.
pub fn fit_ridge(
    table: &DataTable,
    rows: &[usize],
    encoding: &Encoding,
    y: &[f64],
    l2: f64,
) -> Result<RidgeModel> {
    assert_eq!(rows.len(), y.len());
    if rows.is_empty() {
        return Err(Error::InvalidParam("empty training set".into()));
    }
    let x = encoding.design(table, rows);
    let d = encoding.width();
    let yv = DVector::from_column_slice(y);
    let mut a = x.transpose() * &x;
    for i in 0..d {
        a[(i, i)] += l2;
    }
    let b = x.transpose() * yv;
    let chol = cholesky_with_jitter(&a)
        .ok_or_else(|| Error::InvalidParam("singular ridge system".into()))?;
    let beta = chol.solve(&b);
    Ok(LinearModel {
        encoding: encoding.clone(),
        weights: beta.as_slice()[..d].to_vec(),
        intercept: beta[d],
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticParams {
    pub l2: f64,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for LogisticParams {
    fn default() -> Self {
        LogisticParams {
            l2: 1e-3,
            max_iter: 100,
            tol: 1e-8,
        }
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Penalized negative log-likelihood and its gradient at `beta` (intercept is
/// the last coefficient and is not penalized).
fn nll_and_grad(x: &DMatrix<f64>, y: &[f64], l2: f64, beta: &DVector<f64>) -> (f64, DVector<f64>) {
    let d = beta.len() - 1;
    let z = x * beta;
    let mut nll = 0.0;
    let mut resid = DVector::zeros(y.len());
    for i in 0..y.len() {
        let zi = z[i];
        // ln(1 + e^z) - y z, computed stably
        nll += zi.max(0.0) + (-zi.abs()).exp().ln_1p() - y[i] * zi;
        resid[i] = sigmoid(zi) - y[i];
    }
    let mut grad = x.transpose() * resid;
    for j in 0..d {
        nll += 0.5 * l2 * beta[j] * beta[j];
        grad[j] += l2 * beta[j];
    }
    (nll, grad)
}

/// Binary logistic fit on 0/1 responses; returns the weight vector over the
/// encoding plus the intercept. Deterministic: zero initialization, damped
/// Newton steps, stop when the applied step's max component is below `tol`.
fn fit_logistic_raw(
    table: &DataTable,
    rows: &[usize],
    encoding: &Encoding,
    y: &[f64],
    params: LogisticParams,
) -> Result<LinearModel> {
    let x = encoding.design(table, rows);
    let d = encoding.width();
    let mut beta = DVector::zeros(d + 1);
    let (mut nll, mut grad) = nll_and_grad(&x, y, params.l2, &beta);
    for _ in 0..params.max_iter {
        // Hessian X^T W X + l2 on the weight block
        let z = &x * &beta;
        let mut h = DMatrix::zeros(d + 1, d + 1);
        for i in 0..rows.len() {
            let p = sigmoid(z[i]);
            let w = (p * (1.0 - p)).max(1e-12);
            let xi = x.row(i);
            for a in 0..=d {
                let wa = w * xi[a];
                for b in a..=d {
                    h[(a, b)] += wa * xi[b];
                }
            }
        }
        for a in 0..=d {
            for b in 0..a {
                h[(a, b)] = h[(b, a)];
            }
        }
        for j in 0..d {
            h[(j, j)] += params.l2;
        }
        let chol = cholesky_with_jitter(&h)
            .ok_or_else(|| Error::InvalidParam("singular logistic Hessian".into()))?;
        let direction = chol.solve(&grad);

        // backtracking: halve until the penalized NLL decreases
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let candidate = &beta - &direction * step;
            let (cand_nll, cand_grad) = nll_and_grad(&x, y, params.l2, &candidate);
            if cand_nll <= nll {
                let applied = (&direction * step).amax();
                beta = candidate;
                nll = cand_nll;
                grad = cand_grad;
                accepted = true;
                if applied < params.tol {
                    return Ok(extract_model(encoding, &beta, d));
                }
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break; // at a numerical optimum
        }
    }
    Ok(extract_model(encoding, &beta, d))
}

fn extract_model(encoding: &Encoding, beta: &DVector<f64>, d: usize) -> LinearModel {
    LinearModel {
        encoding: encoding.clone(),
        weights: beta.as_slice()[..d].to_vec(),
        intercept: beta[d],
    }
}

/// Logistic classifier over a categorical target: a single binary model for
/// two observed classes, one-vs-rest otherwise. Levels never observed in
/// training receive probability zero.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticClassifier {
    pub n_levels: usize,
    mode: LogisticMode,
}

#[derive(Debug, Clone, PartialEq)]
enum LogisticMode {
    /// P(positive) = sigmoid(decision)
    Binary {
        negative: u32,
        positive: u32,
        model: LinearModel,
    },
    /// normalized per-level sigmoid scores
    OneVsRest { models: Vec<(u32, LinearModel)> },
}

/// Fit a logistic classifier of the (categorical) target on the encoded
/// feature columns. Errors with `degenerate-target` when fewer than two
/// classes are observed on the training rows.
pub fn fit_logistic(
    table: &DataTable,
    rows: &[usize],
    feature_cols: &[usize],
    target_col: usize,
    params: LogisticParams,
) -> Result<LogisticClassifier> {
    if rows.is_empty() {
        return Err(Error::InvalidParam("empty training set".into()));
    }
    let n_levels = match &table.schema()[target_col].kind {
        ColumnKind::Categorical { levels } => levels.len(),
        ColumnKind::Numerical { .. } => {
            return Err(Error::InvalidParam(
                "logistic target must be categorical".into(),
            ))
        }
    };
    let targets: Vec<u32> = rows
        .iter()
        .map(|&r| table.cat(r, target_col).expect("observed target"))
        .collect();
    let mut observed: Vec<u32> = targets.clone();
    observed.sort_unstable();
    observed.dedup();
    if observed.len() < 2 {
        return Err(Error::DegenerateTarget(
            table.schema()[target_col].name.clone(),
        ));
    }
    let encoding = Encoding::fit(table, rows, feature_cols);
    let mode = if observed.len() == 2 {
        let (negative, positive) = (observed[0], observed[1]);
        let y: Vec<f64> = targets
            .iter()
            .map(|&t| if t == positive { 1.0 } else { 0.0 })
            .collect();
        LogisticMode::Binary {
            negative,
            positive,
            model: fit_logistic_raw(table, rows, &encoding, &y, params)?,
        }
    } else {
        let mut models = Vec::with_capacity(observed.len());
        for &level in &observed {
            let y: Vec<f64> = targets
                .iter()
                .map(|&t| if t == level { 1.0 } else { 0.0 })
                .collect();
            models.push((level, fit_logistic_raw(table, rows, &encoding, &y, params)?));
        }
        LogisticMode::OneVsRest { models }
    };
    Ok(LogisticClassifier { n_levels, mode })
}

/// Predicted label and class probabilities over all target levels.
pub fn predict_logistic(
    model: &LogisticClassifier,
    table: &DataTable,
    row: usize,
) -> (u32, Vec<f64>) {
    let mut probs = vec![0.0; model.n_levels];
    match &model.mode {
        LogisticMode::Binary {
            negative,
            positive,
            model,
        } => {
            let p = sigmoid(model.decision(table, row));
            probs[*positive as usize] = p;
            probs[*negative as usize] = 1.0 - p;
        }
        LogisticMode::OneVsRest { models } => {
            let mut total = 0.0;
            for (level, m) in models {
                let s = sigmoid(m.decision(table, row));
                probs[*level as usize] = s;
                total += s;
            }
            if total > 0.0 {
                for p in probs.iter_mut() {
                    *p /= total;
                }
            } else {
                for (level, _) in models {
                    probs[*level as usize] = 1.0 / models.len() as f64;
                }
            }
        }
    }
    (argmax_tie_lowest(&probs) as u32, probs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::missingness::{generate_synthetic, SyntheticSpec};
    use crate::table::{ColumnRole, ColumnSchema, Value};

    #[test]
    fn ridge_recovers_exact_linear_relation() {
        let schema = vec![
            ColumnSchema::numerical("x", ColumnRole::Feature),
            ColumnSchema::numerical("y", ColumnRole::Feature),
        ];
        let n = 2000;
        let mut t = DataTable::with_rows(schema, n).unwrap();
        for r in 0..n {
            let x = 4.0 * r as f64 / (n - 1) as f64;
            t.set(r, 0, Value::Num(x));
            t.set(r, 1, Value::Num(2.0 * x));
        }
        t.derive_open_ranges();
        let rows: Vec<usize> = (0..n).collect();
        let encoding = Encoding::fit(&t, &rows, &[0]);
        let y: Vec<f64> = rows.iter().map(|&r| t.num(r, 1).unwrap()).collect();
        let model = fit_ridge(&t, &rows, &encoding, &y, 1e-4).unwrap();
        // prediction at x = 4 must match the closed-form least-squares value 8
        let pred = model.decision(&t, n - 1);
        assert!((pred - 8.0).abs() < 1e-6, "pred {pred}");
    }

    #[test]
    fn logistic_gradient_matches_finite_differences() {
        let t = generate_synthetic(&SyntheticSpec {
            n_rows: 40,
            n_numerical: 2,
            n_categorical: 1,
            levels_per_categorical: 3,
            correlation: 0.2,
            label_coefficients: vec![1.0, -1.0, 0.5],
            label_noise: 0.3,
            seed: 8,
        })
        .unwrap();
        let rows: Vec<usize> = (0..40).collect();
        let features = t.feature_cols();
        let label = t.label_col().unwrap();
        let encoding = Encoding::fit(&t, &rows, &features);
        let x = encoding.design(&t, &rows);
        let y: Vec<f64> = rows
            .iter()
            .map(|&r| t.cat(r, label).unwrap() as f64)
            .collect();
        let l2 = 0.1;

        // a few non-trivial parameter points
        let mut rng = crate::rng::stream(17);
        use rand::Rng;
        for _ in 0..5 {
            let beta =
                DVector::from_fn(encoding.width() + 1, |_, _| rng.random::<f64>() * 2.0 - 1.0);
            let (_, grad) = nll_and_grad(&x, &y, l2, &beta);
            let eps = 1e-6;
            for j in 0..beta.len() {
                let mut plus = beta.clone();
                plus[j] += eps;
                let mut minus = beta.clone();
                minus[j] -= eps;
                let (f_plus, _) = nll_and_grad(&x, &y, l2, &plus);
                let (f_minus, _) = nll_and_grad(&x, &y, l2, &minus);
                let fd = (f_plus - f_minus) / (2.0 * eps);
                let rel = (grad[j] - fd).abs() / grad[j].abs().max(1.0);
                assert!(rel < 1e-5, "coef {j}: analytic {} vs fd {fd}", grad[j]);
            }
        }
    }

    #[test]
    fn logistic_on_null_data_stays_near_zero() {
        let t = generate_synthetic(&SyntheticSpec {
            n_rows: 2000,
            n_numerical: 3,
            n_categorical: 0,
            levels_per_categorical: 2,
            correlation: 0.0,
            label_coefficients: vec![0.0; 3],
            label_noise: 0.0,
            seed: 23,
        })
        .unwrap();
        let rows: Vec<usize> = (0..2000).collect();
        let model = fit_logistic(
            &t,
            &rows,
            &t.feature_cols(),
            t.label_col().unwrap(),
            LogisticParams::default(),
        )
        .unwrap();
        match &model.mode {
            LogisticMode::Binary { model, .. } => {
                assert!(model.intercept.abs() < 0.1, "intercept {}", model.intercept);
                for w in &model.weights {
                    assert!(w.abs() <= 0.1, "weight {w}");
                }
            }
            _ => panic!("binary expected"),
        }
    }

    #[test]
    fn logistic_separates_thresholded_data() {
        let t = generate_synthetic(&SyntheticSpec {
            n_rows: 600,
            n_numerical: 1,
            n_categorical: 0,
            levels_per_categorical: 2,
            correlation: 0.0,
            label_coefficients: vec![10.0],
            label_noise: 0.0,
            seed: 29,
        })
        .unwrap();
        let train: Vec<usize> = (0..400).collect();
        let test: Vec<usize> = (400..600).collect();
        let label = t.label_col().unwrap();
        let model = fit_logistic(
            &t,
            &train,
            &t.feature_cols(),
            label,
            LogisticParams {
                l2: 1e-4,
                ..LogisticParams::default()
            },
        )
        .unwrap();
        let correct = test
            .iter()
            .filter(|&&r| predict_logistic(&model, &t, r).0 == t.cat(r, label).unwrap())
            .count();
        let acc = correct as f64 / test.len() as f64;
        assert!(acc >= 0.95, "held-out accuracy {acc}");
    }

    #[test]
    fn logistic_rejects_single_class_target() {
        let schema = vec![
            ColumnSchema::numerical("x", ColumnRole::Feature),
            ColumnSchema::categorical("y", &["0", "1"], ColumnRole::Label),
        ];
        let mut t = DataTable::with_rows(schema, 10).unwrap();
        for r in 0..10 {
            t.set(r, 0, Value::Num(r as f64));
            t.set(r, 1, Value::Cat(0));
        }
        let rows: Vec<usize> = (0..10).collect();
        assert!(matches!(
            fit_logistic(&t, &rows, &[0], 1, LogisticParams::default()),
            Err(Error::DegenerateTarget(_))
        ));
    }

    #[test]
    fn one_vs_rest_probabilities_are_normalized() {
        let schema = vec![
            ColumnSchema::numerical("x", ColumnRole::Feature),
            ColumnSchema::categorical("y", &["a", "b", "c"], ColumnRole::Feature),
        ];
        let mut t = DataTable::with_rows(schema, 90).unwrap();
        let mut rng = crate::rng::stream(4);
        use rand::Rng;
        for r in 0..90 {
            let c = (r % 3) as u32;
            t.set(r, 0, Value::Num(c as f64 + rng.random::<f64>() * 0.5));
            t.set(r, 1, Value::Cat(c));
        }
        t.derive_open_ranges();
        let rows: Vec<usize> = (0..90).collect();
        let model = fit_logistic(&t, &rows, &[0], 1, LogisticParams::default()).unwrap();
        for r in 0..90 {
            let (_, probs) = predict_logistic(&model, &t, r);
            assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
