use std::f64::consts::PI;

use ptwell::acceptance::{self, CriterionReport};
use ptwell::criticality::{critical_coupling, solve_exceptional_half, verify_crossing};
use ptwell::eigenstates::{Eigenstate, DOUBLE_ROOT_TOL};
use ptwell::error::{Error, Result};
use ptwell::metric::{
    build_biorthogonal, build_metric, cutoff_estimate, matrix_rows, quasi_hermiticity_residual,
    resolution_of_identity, separable_metric,
};
use ptwell::oracle::{oracle_spectrum, richardson};
use ptwell::perturbation::{
    lambda_mu_matrix_elements, sc_expansions, tan_kappa_series, tau_series, z_series, ShiftSign,
};
use ptwell::secular::{find_spectrum, find_spectrum_with_pairs};
use ptwell::series::SeriesPoly;
use ptwell::{Regime, SpectralRoot, WellConfig};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::output::{cx, num, Outcome, Table};

fn regime_name(r: Regime) -> &'static str {
    match r {
        Regime::Real => "real",
        Regime::ComplexPair => "complex-pair",
    }
}

fn root_json(r: &SpectralRoot) -> Value {
    json!({
        "n": r.n,
        "kappa": cx(r.kappa.re, r.kappa.im),
        "energy": cx(r.energy.re, r.energy.im),
        "regime": regime_name(r.regime),
    })
}

fn root_row(xi: Option<f64>, r: &SpectralRoot) -> Vec<String> {
    let mut row: Vec<String> = xi.map(num).into_iter().collect();
    row.extend([
        r.n.to_string(),
        num(r.kappa.re),
        num(r.kappa.im),
        num(r.energy.re),
        num(r.energy.im),
        regime_name(r.regime).to_string(),
    ]);
    row
}

struct SpectrumPoint {
    xi: f64,
    roots: Vec<SpectralRoot>,
    merger_flag: bool,
}

fn spectrum_point(a: f64, xi: f64, n_max: usize, allow_complex: bool) -> Result<SpectrumPoint> {
    let config = WellConfig::new(a, xi)?;
    if allow_complex {
        let roots = find_spectrum_with_pairs(&config, n_max)?;
        let merger_flag = roots.iter().any(|r| r.regime == Regime::ComplexPair);
        Ok(SpectrumPoint {
            xi,
            roots,
            merger_flag,
        })
    } else {
        let s = find_spectrum(&config, n_max)?;
        Ok(SpectrumPoint {
            xi,
            merger_flag: s.has_merger_flag(),
            roots: s.roots,
        })
    }
}

pub fn spectrum(a: f64, xi: f64, n_max: usize, allow_complex: bool) -> Result<Outcome> {
    let p = spectrum_point(a, xi, n_max, allow_complex)?;
    let mut table = Table::new(&[
        "n",
        "kappa_re",
        "kappa_im",
        "energy_re",
        "energy_im",
        "regime",
    ]);
    for r in &p.roots {
        table.push(root_row(None, r));
    }
    Ok(Outcome {
        result: json!({
            "a": a,
            "xi": xi,
            "merger_flag": p.merger_flag,
            "levels": p.roots.iter().map(root_json).collect::<Vec<_>>(),
        }),
        table,
        ok: true,
    })
}

pub fn spectrum_sweep(a: f64, xis: &[f64], n_max: usize, allow_complex: bool) -> Outcome {
    let points: Vec<(f64, Result<SpectrumPoint>)> = xis
        .par_iter()
        .map(|&xi| (xi, spectrum_point(a, xi, n_max, allow_complex)))
        .collect();
    let mut table = Table::new(&[
        "xi",
        "n",
        "kappa_re",
        "kappa_im",
        "energy_re",
        "energy_im",
        "regime",
    ]);
    let mut entries = Vec::with_capacity(points.len());
    let mut ok = true;
    for (xi, p) in &points {
        match p {
            Ok(p) => {
                for r in &p.roots {
                    table.push(root_row(Some(p.xi), r));
                }
                entries.push(json!({
                    "xi": xi,
                    "merger_flag": p.merger_flag,
                    "levels": p.roots.iter().map(root_json).collect::<Vec<_>>(),
                }));
            }
            Err(e) => {
                ok = false;
                let mut row = vec![num(*xi)];
                row.extend(std::iter::repeat_n(String::new(), 5));
                row.push(format!("error:{}", e.kind()));
                table.push(row);
                entries.push(
                    json!({ "xi": xi, "error": { "kind": e.kind(), "message": e.to_string() } }),
                );
            }
        }
    }
    Outcome {
        result: json!({ "a": a, "points": entries }),
        table,
        ok,
    }
}

/// Parses `lo:hi:step` into an inclusive grid.
pub fn parse_sweep(spec: &str) -> std::result::Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [lo, hi, step] = parts.as_slice() else {
        return Err(format!("expected lo:hi:step, got {spec:?}"));
    };
    let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| format!("{s:?}: {e}"));
    let (lo, hi, step) = (parse(lo)?, parse(hi)?, parse(step)?);
    if !(step > 0.0 && hi >= lo && lo.is_finite() && hi.is_finite()) {
        return Err(format!("invalid sweep {spec:?}"));
    }
    // round to the decimals written so that 0.1 steps print as typed
    let decimals = parts
        .iter()
        .map(|p| p.trim().split_once('.').map_or(0, |(_, f)| f.len()))
        .max()
        .unwrap_or(0);
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=count)
        .map(|i| {
            let x = lo + i as f64 * step;
            format!("{x:.decimals$}").parse().unwrap_or(x)
        })
        .collect())
}

pub const WAVEFUNCTION_CHECK_TOL: f64 = 1e-8;

pub fn wavefunction(a: f64, xi: f64, n: usize, grid_points: usize) -> Result<Outcome> {
    if grid_points < 2 {
        return Err(Error::Domain {
            what: "grid points",
            value: grid_points as f64,
        });
    }
    let config = WellConfig::new(a, xi)?;
    let spectrum = find_spectrum(&config, n)?;
    let state = Eigenstate::new(&config, &spectrum.roots[n - 1])?;
    let scale = (0..=20)
        .map(|i| state.eval(-1.0 + 0.1 * i as f64).norm())
        .fold(0.0, f64::max);
    let jump = |x: f64, sign: f64| {
        let e = 1e-9;
        let d = state.derivative(x + e) - state.derivative(x - e);
        (d - num_complex_i(sign * xi) * state.eval(x)).norm() / (scale * state.kappa)
    };
    let jump_residual = jump(a, 1.0).max(jump(-a, -1.0));
    let mut pt_residual = 0.0f64;
    let mut table = Table::new(&["x", "re", "im"]);
    let mut samples = Vec::with_capacity(grid_points);
    for i in 0..grid_points {
        let x = -1.0 + 2.0 * i as f64 / (grid_points - 1) as f64;
        let v = state.eval(x);
        pt_residual = pt_residual.max((state.eval(-x) - v.conj()).norm() / scale);
        table.push(vec![num(x), num(v.re), num(v.im)]);
        samples.push(json!([x, v.re, v.im]));
    }
    let c = state.coeffs;
    Ok(Outcome {
        result: json!({
            "a": a,
            "xi": xi,
            "n": n,
            "kappa": state.kappa,
            "coefficients": {
                "alpha": c.alpha, "beta": c.beta, "gamma": c.gamma, "delta": c.delta,
                "normalization": c.norm_convention, "chain": c.chain,
            },
            "jump_residual": jump_residual,
            "pt_residual": pt_residual,
            "samples": samples,
        }),
        table,
        ok: jump_residual < WAVEFUNCTION_CHECK_TOL && pt_residual < WAVEFUNCTION_CHECK_TOL,
    })
}

fn num_complex_i(y: f64) -> num_complex::Complex64 {
    num_complex::Complex64::new(0.0, y)
}

pub fn critical(a: f64, window: usize) -> Result<Outcome> {
    let cc = critical_coupling(a, window)?;
    let mut result = json!({
        "a": a,
        "window": window,
        "xi_crit": cc.xi_crit,
        "kappa": cc.kappa,
        "pair": [cc.pair.0, cc.pair.1],
        "window_limited": cc.window_limited,
    });
    let mut table = Table::new(&[
        "a",
        "xi_crit",
        "kappa",
        "level_lo",
        "level_hi",
        "window_limited",
    ]);
    table.push(vec![
        num(a),
        num(cc.xi_crit),
        num(cc.kappa),
        cc.pair.0.to_string(),
        cc.pair.1.to_string(),
        cc.window_limited.to_string(),
    ]);
    if (a - 0.5).abs() < f64::EPSILON {
        let ep = solve_exceptional_half()?;
        result["exceptional_point"] = json!({
            "nu0": ep.nu0, "mu0": ep.mu0, "xi_crit": ep.xi_crit,
            "level_pair": [ep.level_pair.0, ep.level_pair.1],
            "residuals": ep.residuals,
        });
    }
    Ok(Outcome {
        result,
        table,
        ok: true,
    })
}

pub fn crossings(m_max: u32, offset: f64) -> Result<Outcome> {
    let mut table = Table::new(&[
        "m",
        "xi",
        "kappa_fixed",
        "secular_value",
        "factor_value",
        "separates",
    ]);
    let mut rows = Vec::new();
    let mut ok = true;
    for m in 1..=m_max {
        let r = verify_crossing(m, offset)?;
        ok &= r.secular_value.abs() < 1e-12 && r.separates();
        table.push(vec![
            m.to_string(),
            num(r.xi),
            num(r.kappa_fixed),
            num(r.secular_value),
            num(r.factor_value),
            r.separates().to_string(),
        ]);
        rows.push(serde_json::to_value(&r).expect("report serializes"));
    }
    Ok(Outcome {
        result: json!({ "offset": offset, "crossings": rows }),
        table,
        ok,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SeriesKind {
    Z,
    Tau,
    Sc,
    Matrix,
    Tan,
}

fn series_entries(name: &str, s: &SeriesPoly, table: &mut Table) -> Value {
    let vars = s.vars().names();
    let terms: Vec<Value> = s
        .terms()
        .map(|(e, c)| {
            let exps = &e[..vars.len()];
            let mut row = vec![name.to_string()];
            row.extend(exps.iter().map(|x| x.to_string()));
            row.resize(4, String::new());
            row.push(c.numer().to_string());
            row.push(c.denom().to_string());
            table.push(row);
            json!({ "exponents": exps, "numerator": c.numer().to_string(), "denominator": c.denom().to_string() })
        })
        .collect();
    json!({ "name": name, "variables": vars, "order": s.order(), "terms": terms, "table": s.to_table() })
}

pub fn series(kind: SeriesKind, order: u32, shift: ShiftSign) -> Result<Outcome> {
    let mut table = Table::new(&["series", "e1", "e2", "e3", "numerator", "denominator"]);
    let named: Vec<(&str, SeriesPoly)> = match kind {
        SeriesKind::Z => vec![("z", z_series(order)?)],
        SeriesKind::Tau => {
            let t = tau_series(order)?;
            vec![("x", t.x), ("y", t.y)]
        }
        SeriesKind::Sc => {
            let s = sc_expansions(order)?;
            vec![
                ("sqrt2_s", s.sqrt2_s),
                ("sqrt2_c", s.sqrt2_c),
                ("s_over_c", s.s_over_c),
            ]
        }
        SeriesKind::Matrix => {
            let m = lambda_mu_matrix_elements(order, shift)?;
            vec![("sqrt2_s", m.sqrt2_s), ("sqrt2_c", m.sqrt2_c)]
        }
        SeriesKind::Tan => vec![("tan", tan_kappa_series(order, shift)?)],
    };
    let series: Vec<Value> = named
        .iter()
        .map(|(n, s)| series_entries(n, s, &mut table))
        .collect();
    Ok(Outcome {
        result: json!({ "order": order, "series": series }),
        table,
        ok: true,
    })
}

pub struct MetricArgs {
    pub a: f64,
    pub xi: f64,
    pub n: usize,
    pub weights: Option<Vec<f64>>,
    pub basis: usize,
    pub cutoff_tol: f64,
}

pub const METRIC_GRAM_TOL: f64 = 1e-9;
pub const METRIC_QH_TOL: f64 = 1e-8;

pub fn metric(args: &MetricArgs) -> Result<Outcome> {
    let config = WellConfig::new(args.a, args.xi)?;
    let system = build_biorthogonal(&config, args.n)?;
    let weights = args.weights.clone().unwrap_or_else(|| vec![1.0; args.n]);
    let cutoff = cutoff_estimate(&config, args.cutoff_tol, args.basis)?;
    let m = build_metric(&system, &weights)?.with_cutoff(cutoff.clone());
    let qh = quasi_hermiticity_residual(&m, &system);
    let identity = resolution_of_identity(&system)?;
    let sep = separable_metric(&system, &weights, args.basis.max(args.n))?;
    let rows = matrix_rows(&m.representation);
    let mut table = Table::new(&["row", "col", "re", "im"]);
    for (i, r) in rows.iter().enumerate() {
        for (j, v) in r.iter().enumerate() {
            table.push(vec![
                (i + 1).to_string(),
                (j + 1).to_string(),
                num(v.re),
                num(v.im),
            ]);
        }
    }
    let ok =
        system.gram_tolerance < METRIC_GRAM_TOL && qh < METRIC_QH_TOL && m.min_eigenvalue > 0.0;
    Ok(Outcome {
        result: json!({
            "a": args.a,
            "xi": args.xi,
            "n": args.n,
            "weights": weights,
            "energies": system.energies,
            "parity_overlaps": system.parity_overlaps,
            "q_norms": system.q_norms,
            "mixed_signs": system.mixed_signs(),
            "gram_residual": system.gram_tolerance,
            "hermiticity": m.hermiticity,
            "min_eigenvalue": m.min_eigenvalue,
            "max_eigenvalue": m.max_eigenvalue,
            "quasi_hermiticity_residual": qh,
            "resolution_of_identity": identity,
            "cutoff": cutoff,
            "separable": {
                "basis_size": sep.basis_size,
                "hermiticity": sep.hermiticity,
                "min_eigenvalue": sep.min_eigenvalue,
            },
            "metric": rows.iter().map(|r| r.iter().map(|v| cx(v.re, v.im)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        }),
        table,
        ok,
    })
}

pub const ORACLE_CONJUGATE_TOL: f64 = 1e-8;

pub fn oracle(a: f64, xi: f64, m: usize, count: usize, extrapolate: bool) -> Result<Outcome> {
    let config = WellConfig::new(a, xi)?;
    let fine = oracle_spectrum(&config, m)?;
    let coarse = if extrapolate {
        Some(oracle_spectrum(&config, m / 2)?)
    } else {
        None
    };
    let raw = fine.lowest(count).to_vec();
    let extrapolated = match &coarse {
        Some(c) => Some(richardson(c, &fine, count)?),
        None => None,
    };
    let mut table = Table::new(&["n", "re", "im", "extrapolated_re", "extrapolated_im"]);
    for (i, e) in raw.iter().enumerate() {
        let (xr, xi_) = extrapolated
            .as_ref()
            .map_or((String::new(), String::new()), |x| {
                (num(x[i].re), num(x[i].im))
            });
        table.push(vec![(i + 1).to_string(), num(e.re), num(e.im), xr, xi_]);
    }
    let defect = fine.conjugate_pair_defect();
    Ok(Outcome {
        result: json!({
            "a": a,
            "xi": xi,
            "m": m,
            "eigenvalues": raw.iter().map(|e| cx(e.re, e.im)).collect::<Vec<_>>(),
            "extrapolated": extrapolated.map(|x| x.iter().map(|e| cx(e.re, e.im)).collect::<Vec<_>>()),
            "conjugate_pair_defect": defect,
            "square_well": (1..=count).map(|n| (n as f64 * PI / 2.0).powi(2)).collect::<Vec<_>>(),
        }),
        table,
        ok: defect < ORACLE_CONJUGATE_TOL,
    })
}

pub fn verify(ids: &[u8]) -> Result<(Outcome, Vec<CriterionReport>)> {
    let reports = ids
        .iter()
        .map(|&id| acceptance::run_criterion(id))
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(&[
        "criterion",
        "title",
        "status",
        "elapsed_s",
        "budget_s",
        "failed_checks",
    ]);
    for r in &reports {
        table.push(vec![
            r.id.to_string(),
            r.title.to_string(),
            if r.passed() { "PASS" } else { "FAIL" }.to_string(),
            format!("{:.3}", r.elapsed),
            num(r.budget),
            r.failures()
                .iter()
                .map(|c| c.name.as_str())
                .collect::<Vec<_>>()
                .join("; "),
        ]);
    }
    let ok = reports.iter().all(|r| r.passed());
    Ok((
        Outcome {
            result: serde_json::to_value(&reports).expect("reports serialize"),
            table,
            ok,
        },
        reports,
    ))
}

pub const SPECTRUM_TOLERANCES: &[(&str, f64)] = &[
    ("root_residual", ptwell::secular::ROOT_TOL),
    ("bracket_width", ptwell::secular::WIDTH_TOL),
    ("touch", ptwell::secular::TOUCH_TOL),
    ("near_merger", ptwell::secular::NEAR_MERGER),
    ("complex_residual", ptwell::secular::COMPLEX_TOL),
];

pub const WAVEFUNCTION_TOLERANCES: &[(&str, f64)] = &[
    ("matching", ptwell::eigenstates::MATCHING_TOL),
    (
        "chain_consistency",
        ptwell::eigenstates::CHAIN_CONSISTENCY_TOL,
    ),
    ("double_root", DOUBLE_ROOT_TOL),
    ("self_check", WAVEFUNCTION_CHECK_TOL),
];

pub const CRITICAL_TOLERANCES: &[(&str, f64)] = &[
    ("tangency", ptwell::criticality::TANGENCY_TOL),
    ("xi_bisection", ptwell::criticality::XI_TOL),
    ("xi_step", ptwell::criticality::XI_STEP),
];

pub const CROSSING_TOLERANCES: &[(&str, f64)] = &[
    ("secular_value", 1e-12),
    ("touch", ptwell::secular::TOUCH_TOL),
];

pub const METRIC_TOLERANCES: &[(&str, f64)] = &[
    ("parity_imaginary", ptwell::metric::PARITY_IMAG_TOL),
    ("self_orthogonal", ptwell::metric::SELF_ORTHOGONAL_TOL),
    ("quadrature_agreement", ptwell::metric::QUADRATURE_AGREEMENT),
    ("degeneracy", ptwell::metric::DEGENERACY_TOL),
    ("gram", METRIC_GRAM_TOL),
    ("quasi_hermiticity", METRIC_QH_TOL),
];

pub const ORACLE_TOLERANCES: &[(&str, f64)] = &[("conjugate_pair", ORACLE_CONJUGATE_TOL)];

pub const VERIFY_TOLERANCES: &[(&str, f64)] = &[
    ("exceptional_point", acceptance::EP_TOL),
    ("crossing_xi", acceptance::CROSSING_XI_TOL),
    ("crossing_kappa", acceptance::CROSSING_KAPPA_TOL),
    ("square_well", acceptance::SQUARE_WELL_TOL),
    ("fixed_level", acceptance::FIXED_LEVEL_TOL),
    ("series_root_factor", acceptance::SERIES_ROOT_FACTOR),
    ("oracle_relative", acceptance::ORACLE_REL_TOL),
    ("pair_relative", acceptance::PAIR_REL_TOL),
    ("gram", acceptance::GRAM_TOL),
    ("parity_imaginary", acceptance::PARITY_IMAG_TOL),
    ("hermiticity", acceptance::HERMITICITY_TOL),
    ("quasi_hermiticity", acceptance::QUASI_HERMITICITY_TOL),
];
