use clap::Args;
use glie::geometry::{ArcGeometry, FieldPoint};
use glie::induction::{
    filament_node_velocity, velocity_elliptic, velocity_glie_asymptotic, velocity_lia, velocity_local,
    FilamentNodeState,
};
use glie::karp_sitnik::{series_f, MAX_ORDER};
use glie::oracle::{velocity_components_quadrature, FrameVelocity};
use glie::quad::{integrate_scalar, QuadOptions};
use glie::vector::Vec3;
use rayon::prelude::*;
use serde_json::{json, Map, Value};
use std::sync::atomic::{AtomicUsize, Ordering};

use crate::config::{ArcArgs, Evaluator, GridArgs, GridPoint, GridRange, OutputArgs, Triple};
use crate::table::{Cell, Table};
use crate::CliError;

/// Largest quadrature tolerance the oracle accepts.
const ORACLE_MAX_TOL: f64 = 1e-6;

/// Slack in ulps of `|F|` allowed when testing bracket membership of a quadrature value.
const BRACKET_ULPS: f64 = 64.0;

#[derive(Debug, Clone, Args)]
pub struct FieldMapArgs {
    #[command(flatten)]
    pub arc: ArcArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Evaluators to tabulate, comma separated.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "elliptic")]
    pub evaluator: Vec<Evaluator>,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub arc: ArcArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Reference for the deviation columns.
    #[arg(long, value_enum, default_value_t = Evaluator::Oracle)]
    pub evaluator: Evaluator,
}

#[derive(Debug, Clone, Args)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub output: OutputArgs,
    /// λ = sin φ values as a:b:n, each in [0, 1).
    #[arg(long, default_value = "0:0.9:4")]
    pub lambda_range: GridRange,
    /// Moduli as a:b:n, each in (0, 1].
    #[arg(long, default_value = "0.9:1:3")]
    pub k_range: GridRange,
    /// Lowest series order.
    #[arg(long, default_value_t = 1)]
    pub min_order: usize,
    /// Highest series order.
    #[arg(long, default_value_t = 4)]
    pub max_order: usize,
}

#[derive(Debug, Clone, Args)]
pub struct NodeArgs {
    #[command(flatten)]
    pub arc: ArcArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Source of the induced velocity V_I.
    #[arg(long, value_enum, default_value_t = Evaluator::Elliptic)]
    pub evaluator: Evaluator,
    /// Node position relative to the arc midpoint, x,y,z.
    #[arg(long, allow_hyphen_values = true)]
    pub position: Triple,
    /// Unit tangent at the node.
    #[arg(long, allow_hyphen_values = true, default_value = "1,0,0")]
    pub tangent: Triple,
    /// Superfluid velocity V_S.
    #[arg(long, allow_hyphen_values = true, default_value = "0,0,0")]
    pub v_s: Triple,
    /// Normal-fluid velocity V_N.
    #[arg(long, allow_hyphen_values = true, default_value = "0,0,0")]
    pub v_n: Triple,
    /// Mutual friction coefficient β.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub beta: f64,
    /// Mutual friction coefficient β′.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub beta_prime: f64,
}

/// Table plus its metadata echo.
pub struct Output {
    pub table: Table,
    pub metadata: Map<String, Value>,
}

fn metadata(command: &str) -> Map<String, Value> {
    let mut meta = Map::new();
    meta.insert("command".into(), json!(command));
    meta.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    meta
}

fn check_oracle_tol(evaluators: &[Evaluator], tol: f64) -> Result<(), CliError> {
    if evaluators.contains(&Evaluator::Oracle) && tol > ORACLE_MAX_TOL {
        return Err(CliError::Config(format!(
            "the oracle evaluator needs --tol <= {ORACLE_MAX_TOL}, got {tol}"
        )));
    }
    Ok(())
}

/// Counts asymptotic-form evaluations outside the validity region.
#[derive(Default)]
struct Warnings(AtomicUsize);

impl Warnings {
    fn report(&self) {
        let n = self.0.load(Ordering::Relaxed);
        if n > 0 {
            eprintln!(
                "warning: {n} glie evaluation(s) outside epsilon <= {}, half-angle <= {}",
                glie::induction::GLIE_MAX_EPSILON,
                glie::induction::GLIE_MAX_HALF_ANGLE
            );
        }
    }
}

fn evaluate(
    ev: Evaluator,
    arc: &ArcGeometry,
    x: &FieldPoint,
    tol: f64,
    warnings: &Warnings,
) -> glie::Result<FrameVelocity> {
    match ev {
        Evaluator::Oracle => velocity_components_quadrature(arc, x, tol),
        Evaluator::Elliptic => velocity_elliptic(arc, x),
        Evaluator::Local => velocity_local(arc, x),
        Evaluator::Glie => {
            let g = velocity_glie_asymptotic(arc, x)?;
            if g.warning.is_some() {
                warnings.0.fetch_add(1, Ordering::Relaxed);
            }
            Ok(g.velocity)
        }
        Evaluator::Lia => velocity_lia(arc, x),
    }
}

fn numerical(x: &FieldPoint, eps: f64, ev: Evaluator, err: glie::Error) -> CliError {
    let [a, b, c] = x.cartesian.0;
    CliError::Numerical(format!(
        "{} failed at x = ({a:e}, {b:e}, {c:e}), epsilon = {eps:e}: {err}",
        ev.name()
    ))
}

/// Evaluates `row` at every grid point in parallel, keeping grid order; the first failure wins.
fn map_grid<F>(points: &[GridPoint], row: F) -> Result<Vec<Vec<Cell>>, CliError>
where
    F: Fn(f64, Vec3) -> Result<Vec<Cell>, CliError> + Sync,
{
    let rows: Vec<Result<Vec<Cell>, CliError>> = points.par_iter().map(|&(eps, dir)| row(eps, dir)).collect();
    rows.into_iter().collect()
}

fn point_columns(x: &FieldPoint, eps: f64) -> Vec<Cell> {
    let [a, b, c] = x.cartesian.0;
    vec![Cell::Num(a), Cell::Num(b), Cell::Num(c), Cell::Num(eps)]
}

pub fn field_map(args: &FieldMapArgs) -> Result<Output, CliError> {
    args.output.validate()?;
    check_oracle_tol(&args.evaluator, args.output.tol)?;
    let arc = args.arc.arc()?;
    let points = args.grid.points()?;
    let mut columns: Vec<String> = ["x1", "x2", "x3", "epsilon", "tol"].map(String::from).to_vec();
    for ev in &args.evaluator {
        for c in ["v_t", "v_n", "v_b", "v_norm"] {
            columns.push(format!("{}_{c}", ev.name()));
        }
    }
    let tol = args.output.tol;
    let warnings = Warnings::default();
    let rows = map_grid(&points, |eps, dir| {
        let x = FieldPoint::from_epsilon(&arc, eps, dir);
        let mut row = point_columns(&x, eps);
        row.push(Cell::Num(tol));
        for &ev in &args.evaluator {
            let v = evaluate(ev, &arc, &x, tol, &warnings).map_err(|e| numerical(&x, eps, ev, e))?;
            row.extend([v.tangent, v.normal, v.binormal, v.norm()].map(Cell::Num));
        }
        Ok(row)
    })?;
    warnings.report();
    let mut table = Table::new(columns);
    table.rows = rows;
    let mut meta = metadata("field-map");
    args.arc.metadata(&mut meta);
    args.grid.metadata(&mut meta);
    args.output.metadata(&mut meta);
    meta.insert(
        "evaluators".into(),
        json!(args.evaluator.iter().map(|e| e.name()).collect::<Vec<_>>()),
    );
    Ok(Output { table, metadata: meta })
}

const COMPARED: [Evaluator; 4] = [Evaluator::Lia, Evaluator::Glie, Evaluator::Local, Evaluator::Oracle];

/// Least-squares line `y = slope·t + intercept`.
fn linear_fit(t: &[f64], y: &[f64]) -> (f64, f64) {
    let n = t.len() as f64;
    let tm = t.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let sxy: f64 = t.iter().zip(y).map(|(a, b)| (a - tm) * (b - ym)).sum();
    let sxx: f64 = t.iter().map(|a| (a - tm) * (a - tm)).sum();
    let slope = sxy / sxx;
    (slope, ym - slope * tm)
}

pub fn compare(args: &CompareArgs) -> Result<Output, CliError> {
    args.output.validate()?;
    check_oracle_tol(&COMPARED, args.output.tol)?;
    let arc = args.arc.arc()?;
    let points = args.grid.points()?;
    let mut columns: Vec<String> = ["x1", "x2", "x3", "epsilon"].map(String::from).to_vec();
    for ev in COMPARED {
        columns.push(format!("{}_b", ev.name()));
    }
    for ev in COMPARED {
        columns.push(format!("{}_rel_dev", ev.name()));
    }
    let tol = args.output.tol;
    let reference = args.evaluator;
    let warnings = Warnings::default();
    let rows = map_grid(&points, |eps, dir| {
        let x = FieldPoint::from_epsilon(&arc, eps, dir);
        let mut row = point_columns(&x, eps);
        let b: Vec<f64> = COMPARED
            .iter()
            .map(|&ev| {
                evaluate(ev, &arc, &x, tol, &warnings)
                    .map(|v| v.binormal)
                    .map_err(|e| numerical(&x, eps, ev, e))
            })
            .collect::<Result<_, _>>()?;
        let b_ref = match COMPARED.iter().position(|&e| e == reference) {
            Some(i) => b[i],
            None => {
                evaluate(reference, &arc, &x, tol, &warnings)
                    .map_err(|e| numerical(&x, eps, reference, e))?
                    .binormal
            }
        };
        row.extend(b.iter().map(|&v| Cell::Num(v)));
        row.extend(b.iter().map(|&v| Cell::Num((v - b_ref) / b_ref.abs())));
        Ok(row)
    })?;
    warnings.report();
    let mut table = Table::new(columns);
    let t: Vec<f64> = points.iter().map(|&(eps, _)| (1.0 / eps).ln()).collect();
    for (i, ev) in COMPARED.iter().enumerate() {
        let y: Vec<f64> = rows
            .iter()
            .map(|r| match r[4 + i] {
                Cell::Num(v) => v.abs(),
                _ => unreachable!(),
            })
            .collect();
        let (slope, intercept) = linear_fit(&t, &y);
        let mut rec = Map::new();
        rec.insert("fit".into(), json!("abs_b_vs_ln_inv_eps"));
        rec.insert("evaluator".into(), json!(ev.name()));
        rec.insert("slope".into(), json!(slope));
        rec.insert("intercept".into(), json!(intercept));
        rec.insert("kappa".into(), json!(arc.kappa * arc.circulation_scale));
        table.footer.push(rec);
    }
    table.rows = rows;
    let mut meta = metadata("compare");
    args.arc.metadata(&mut meta);
    args.grid.metadata(&mut meta);
    args.output.metadata(&mut meta);
    meta.insert("reference".into(), json!(reference.name()));
    Ok(Output { table, metadata: meta })
}

/// `F(asin λ, k)` by quadrature of `1/√(1 − k² sin²θ)`, with its error estimate.
fn f_quadrature(lambda: f64, k: f64, tol: f64) -> glie::Result<(f64, f64)> {
    let m = k * k;
    integrate_scalar(
        |t| {
            let s = t.sin();
            1.0 / (1.0 - m * s * s).sqrt()
        },
        0.0,
        lambda.asin(),
        &[],
        &QuadOptions::relative(tol),
    )
}

pub fn converge(args: &ConvergeArgs) -> Result<Output, CliError> {
    args.output.validate()?;
    if !(1..=args.max_order).contains(&args.min_order) || args.max_order > MAX_ORDER {
        return Err(CliError::Config(format!(
            "orders must satisfy 1 <= min-order <= max-order <= {MAX_ORDER}"
        )));
    }
    let lambdas = args.lambda_range.points();
    let ks = args.k_range.points();
    if let Some(l) = lambdas.iter().find(|l| !(0.0..1.0).contains(*l)) {
        return Err(CliError::Config(format!("lambda values must lie in [0, 1), got {l}")));
    }
    if let Some(k) = ks.iter().find(|k| !(**k > 0.0 && **k <= 1.0)) {
        return Err(CliError::Config(format!("k values must lie in (0, 1], got {k}")));
    }
    let tol = args.output.tol;
    let mut cases = Vec::new();
    for &lambda in &lambdas {
        for &k in &ks {
            for n in args.min_order..=args.max_order {
                cases.push((lambda, k, n));
            }
        }
    }
    let rows: Vec<Result<Vec<Cell>, CliError>> = cases
        .par_iter()
        .map(|&(lambda, k, n)| {
            let fail = |e: glie::Error| CliError::Numerical(format!("lambda = {lambda:e}, k = {k:e}, N = {n}: {e}"));
            let s = series_f(lambda, k, n).map_err(fail)?;
            let (f, err) = f_quadrature(lambda, k, tol).map_err(fail)?;
            let slack = err + BRACKET_ULPS * f64::EPSILON * f.abs();
            let inside = s.bracket.0 - slack <= f && f <= s.bracket.1 + slack;
            Ok(vec![
                Cell::Num(lambda),
                Cell::Num(k),
                Cell::Int(n as i64),
                Cell::Num(s.value),
                Cell::Num(s.remainder_lo),
                Cell::Num(s.remainder_hi),
                Cell::Num(f),
                Cell::Bool(inside),
            ])
        })
        .collect();
    let mut table = Table::new(
        ["lambda", "k", "N", "series", "lo", "hi", "F_quad", "in_bracket"]
            .map(String::from)
            .to_vec(),
    );
    table.rows = rows.into_iter().collect::<Result<_, _>>()?;
    let mut meta = metadata("converge");
    args.output.metadata(&mut meta);
    meta.insert("lambda_range".into(), json!(args.lambda_range.to_string()));
    meta.insert("k_range".into(), json!(args.k_range.to_string()));
    meta.insert("min_order".into(), json!(args.min_order));
    meta.insert("max_order".into(), json!(args.max_order));
    meta.insert("bracket_slack_ulps".into(), json!(BRACKET_ULPS));
    Ok(Output { table, metadata: meta })
}

pub fn node_velocity(args: &NodeArgs) -> Result<Output, CliError> {
    args.output.validate()?;
    check_oracle_tol(&[args.evaluator], args.output.tol)?;
    let arc = args.arc.arc()?;
    let position = Vec3::from(args.position);
    let x = FieldPoint::from_cartesian(position);
    let eps = x.epsilon(&arc);
    let warnings = Warnings::default();
    let v_i = evaluate(args.evaluator, &arc, &x, args.output.tol, &warnings)
        .map_err(|e| numerical(&x, eps, args.evaluator, e))?
        .cartesian;
    warnings.report();
    let state = FilamentNodeState {
        position,
        unit_tangent: args.tangent.into(),
        v_s: args.v_s.into(),
        v_n: args.v_n.into(),
        v_i,
        beta_mf: args.beta,
        beta_mf_prime: args.beta_prime,
    };
    let v = filament_node_velocity(&state).map_err(|e| CliError::Config(e.to_string()))?;
    let mut table = Table::new(
        [
            "x1", "x2", "x3", "v_i_1", "v_i_2", "v_i_3", "dxi_dt_1", "dxi_dt_2", "dxi_dt_3",
        ]
        .map(String::from)
        .to_vec(),
    );
    let mut row: Vec<Cell> = position.0.iter().map(|&c| Cell::Num(c)).collect();
    row.extend(v_i.0.iter().map(|&c| Cell::Num(c)));
    row.extend(v.0.iter().map(|&c| Cell::Num(c)));
    table.push(row);
    let mut meta = metadata("node-velocity");
    args.arc.metadata(&mut meta);
    args.output.metadata(&mut meta);
    meta.insert("evaluator".into(), json!(args.evaluator.name()));
    meta.insert("tangent".into(), json!(args.tangent.0));
    meta.insert("v_s".into(), json!(args.v_s.0));
    meta.insert("v_n".into(), json!(args.v_n.0));
    meta.insert("beta".into(), json!(args.beta));
    meta.insert("beta_prime".into(), json!(args.beta_prime));
    Ok(Output { table, metadata: meta })
}
