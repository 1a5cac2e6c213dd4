//! Verification suites composed from the core operations.

use std::f64::consts::PI;

use heatindex_core::charclass::{
    a_hat, ch_de_rham, index_prefactor, integrate_top, rhs_index, Domain, FormMatrix,
    IdempotentField,
};
use heatindex_core::heat::{
    confining_curvature, heat_supertrace, mehler_kernel, oscillator_fd_oracle,
    rescaled_limit_check, FdGrid,
};
use heatindex_core::jlo::{
    conjugation_expansion_slope, jlo_coefficient, jlo_small_t_limit, k_pairing_index,
    simplex_moment, spectral_index,
};
use heatindex_core::models::{
    bott_projection, dirac_commutator, flat_torus_dirac, landau_model, monopole_model,
    spin_projection, FourierData, MatrixFourierData,
};
use heatindex_core::{CheckRecord, Generators, MultiVector, Result, Table, VerificationReport};
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::config::{RunConfig, Suite};

/// Runs the configured suite. Errors inside a suite are recorded in the
/// report and fail it; they never abort the other suites.
pub fn run_suite(config: &RunConfig) -> VerificationReport {
    let suites: Vec<Suite> = match config.run.suite {
        Suite::All => Suite::ALL
            .into_iter()
            .filter(|&s| s != Suite::All)
            .collect(),
        s => vec![s],
    };
    let mut report = VerificationReport::new(config.run.suite.name());
    for suite in suites {
        let mut part = VerificationReport::new(suite.name());
        let result = match suite {
            Suite::MckeanSinger => mckean_singer(config, &mut part),
            Suite::Mehler => mehler(config, &mut part),
            Suite::Rescale => rescale(config, &mut part),
            Suite::JloLimit => jlo_limit(config, &mut part),
            Suite::KPairing => k_pairing(config, &mut part),
            Suite::Charclass => charclass(config, &mut part),
            Suite::All => unreachable!("expanded above"),
        };
        if let Err(e) = result {
            part.push_error(suite.name(), e);
        }
        if config.run.suite == Suite::All {
            report.merge(part);
        } else {
            report.checks = part.checks;
            report.errors = part.errors;
            report.tables = part.tables;
            report.pass = part.pass;
        }
    }
    report
}

fn mckean_singer(config: &RunConfig, report: &mut VerificationReport) -> Result<()> {
    let tol = config.tolerances.supertrace;
    let mut models = Vec::new();
    for &k in &config.models.fluxes {
        models.push(("landau", k, landau_model(k, config.models.landau_levels)?));
    }
    for &q in &config.models.charges {
        models.push((
            "monopole",
            q,
            monopole_model(q, config.models.monopole_cutoff)?,
        ));
    }
    let mut table = Table {
        name: "mckean_singer".into(),
        header: ["model", "charge", "t", "supertrace", "tail_bound"]
            .map(String::from)
            .to_vec(),
        rows: vec![],
    };
    for (kind, charge, model) in &models {
        for &t in &config.sweeps.heat_times {
            let s = heat_supertrace(model, t)?;
            let code = if *kind == "landau" { 0.0 } else { 1.0 };
            table
                .rows
                .push(vec![code, *charge as f64, t, s.value, s.tail_bound]);
            report.push(
                CheckRecord::absolute(
                    format!("{kind}({charge}) Str e^(-tD^2) at t={t}"),
                    s.value,
                    *charge as f64,
                    tol,
                )
                .with_tail(s.tail_bound),
            );
        }
    }
    report.tables.push(table);
    Ok(())
}

fn mehler(config: &RunConfig, report: &mut VerificationReport) -> Result<()> {
    let zero = MultiVector::zero(Generators::TWO);
    let grid = FdGrid {
        points: config.sweeps.fd_points,
        ..FdGrid::default()
    };
    let mut table = Table {
        name: "mehler".into(),
        header: ["b", "t", "mehler", "finite_difference", "order", "abs_err"]
            .map(String::from)
            .to_vec(),
        rows: vec![],
    };
    for &b in &config.sweeps.mehler_curvatures {
        let r = confining_curvature(b);
        for &t in &config.sweeps.mehler_times {
            let exact = mehler_kernel(&r, &zero, t, [0.0, 0.0])?.scalar_part().re;
            let fd = oscillator_fd_oracle(&r, &zero, t, grid)?;
            table.rows.push(vec![
                b,
                t,
                exact,
                fd.origin,
                fd.order,
                (exact - fd.origin).abs(),
            ]);
            report.push(CheckRecord::absolute(
                format!("Mehler vs FD at b={b}, t={t}"),
                exact,
                fd.origin,
                config.tolerances.mehler,
            ));
            report.push(CheckRecord::at_least(
                format!("FD order at b={b}, t={t}"),
                fd.order,
                config.tolerances.fd_order_min,
            ));
        }
    }
    report.tables.push(table);
    Ok(())
}

fn rescale(config: &RunConfig, report: &mut VerificationReport) -> Result<()> {
    for &f in &config.sweeps.rescale_twists {
        let table = rescaled_limit_check(f, &config.sweeps.rescale_u)?;
        let e12 = Generators::TWO.top();
        report.tables.push(Table {
            name: format!("rescale_f{f}"),
            header: ["u", "error", "value_scalar", "value_e12"]
                .map(String::from)
                .to_vec(),
            rows: table
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.u,
                        r.error,
                        r.value.scalar_part().re,
                        r.value.coefficient(e12).re,
                    ]
                })
                .collect(),
        });
        report.push(CheckRecord::absolute(
            format!("rescaled limit at f={f}"),
            table.limit_error,
            0.0,
            config.tolerances.rescale_limit,
        ));
        report.push(CheckRecord::at_least(
            format!("rescaling exponent at f={f}"),
            table.exponent,
            config.tolerances.rescale_exponent_min,
        ));
    }
    Ok(())
}

fn sin_cos_triple() -> Vec<MatrixFourierData> {
    let s = |f: FourierData| MatrixFourierData::scalar(&f);
    vec![
        s(FourierData::sin((1, 0)).mul(&FourierData::sin((0, 1)))),
        s(FourierData::cos((1, 0))),
        s(FourierData::cos((0, 1))),
    ]
}

fn jlo_limit(config: &RunConfig, report: &mut VerificationReport) -> Result<()> {
    // simplex coefficients against their closed form
    let mut mismatches = 0;
    let mut count = 0;
    for n in 1..=3usize {
        let mut stack: Vec<Vec<u32>> = vec![vec![]];
        while let Some(k) = stack.pop() {
            if k.len() == n {
                count += 1;
                let fact: i128 = k
                    .iter()
                    .map(|&x| (1..=x as i128).product::<i128>())
                    .product();
                let sign = if k.iter().sum::<u32>() % 2 == 0 {
                    1
                } else {
                    -1
                };
                if jlo_coefficient(&k) * num_rational::Ratio::new(sign * fact, 1)
                    != simplex_moment(&k)
                {
                    mismatches += 1;
                }
                continue;
            }
            let used: u32 = k.iter().sum();
            for next in 0..=(6 - used) {
                let mut v = k.clone();
                v.push(next);
                stack.push(v);
            }
        }
    }
    report.push(CheckRecord::flag(
        "simplex moments vs coefficient formula",
        mismatches == 0,
        format!("{count} multi-indices"),
    ));

    let model = flat_torus_dirac(config.models.conjugation_cutoff)?;
    let x = dirac_commutator(
        &model,
        &FourierData::cos((1, 0)).add(&FourierData::sin((0, 1))),
    )?;
    let mut conj = Table {
        name: "conjugation_expansion".into(),
        header: ["order", "t", "residual"].map(String::from).to_vec(),
        rows: vec![],
    };
    for &k in &config.sweeps.conjugation_orders {
        let (slope, rows) =
            conjugation_expansion_slope(&model, &x, &config.sweeps.conjugation_times, k)?;
        conj.rows
            .extend(rows.iter().map(|&(t, r)| vec![k as f64, t, r]));
        report.push(CheckRecord::absolute(
            format!("conjugation residual slope K={k}"),
            slope,
            (k + 1) as f64,
            config.tolerances.slope,
        ));
    }
    report.tables.push(conj);

    let model = flat_torus_dirac(config.models.jlo_cutoff)?;
    let limit = jlo_small_t_limit(
        &model,
        &sin_cos_triple(),
        &config.sweeps.jlo_times,
        config.sweeps.richardson_order,
        config.sweeps.prefactor_exponent,
    )?;
    report.tables.push(Table {
        name: "jlo_limit".into(),
        header: ["t", "value_re", "value_im", "tail_bound"]
            .map(String::from)
            .to_vec(),
        rows: limit
            .samples
            .iter()
            .map(|s| vec![s.t, s.value.re, s.value.im, s.tail_bound])
            .collect(),
    });
    let tail = limit
        .samples
        .iter()
        .map(|s| s.tail_bound)
        .fold(0.0, f64::max);
    report.push(
        CheckRecord::relative(
            "JLO_2 small-t limit (imaginary part) vs de Rham",
            limit.extrapolated.im,
            limit.de_rham.im,
            config.tolerances.jlo_relative,
        )
        .with_tail_info(tail)
        .with_note(format!(
            "extrapolated {:.8}, de Rham {:.8}",
            limit.extrapolated, limit.de_rham
        )),
    );
    report.push(CheckRecord::absolute(
        "JLO_2 small-t limit real part",
        limit.extrapolated.re,
        limit.de_rham.re,
        config.tolerances.jlo_relative,
    ));
    Ok(())
}

fn k_pairing(config: &RunConfig, report: &mut VerificationReport) -> Result<()> {
    let e = bott_projection(config.models.bott_grid)?;
    let g = Generators::TWO;
    let rhs = rhs_index(&e, &FormMatrix::zero(2, g), &FormMatrix::zero(1, g))?;
    let cutoffs = &config.models.pairing_cutoffs;
    let Some(&largest) = cutoffs.iter().max() else {
        return Err(heatindex_core::Error::Argument(
            "no pairing cutoffs configured".into(),
        ));
    };
    let mut table = Table {
        name: "spectral_index".into(),
        header: [
            "cutoff",
            "index",
            "raw",
            "near_zero",
            "threshold",
            "gap_ratio",
        ]
        .map(String::from)
        .to_vec(),
        rows: vec![],
    };
    let mut indices = Vec::new();
    for &m in cutoffs {
        if m == largest {
            continue;
        }
        let s = spectral_index(&MatrixFourierData::from_field(&e, 2 * m)?, m)?;
        table.rows.push(vec![
            m as f64,
            s.index as f64,
            s.raw,
            s.near_zero as f64,
            s.threshold,
            s.gap_ratio,
        ]);
        indices.push(s.index);
    }
    let t = config.sweeps.pairing_time;
    let lambda2 = 4.0 * PI * PI * (largest * largest) as f64;
    report.push(CheckRecord::at_least(
        format!("pairing time window t*lambda^2 at M={largest}"),
        t * lambda2,
        config.tolerances.window,
    ));
    let pairing = k_pairing_index(&flat_torus_dirac(largest)?, &e, t, config.sweeps.degree_cap)?;
    let s = &pairing.spectral;
    table.rows.push(vec![
        largest as f64,
        s.index as f64,
        s.raw,
        s.near_zero as f64,
        s.threshold,
        s.gap_ratio,
    ]);
    indices.push(s.index);
    let threshold = s.threshold;
    report.tables.push(table);

    let index = indices[0];
    report.push(CheckRecord::flag(
        "spectral index is +-1 and stable across cutoffs",
        index.abs() == 1 && indices.iter().all(|&i| i == index),
        format!("indices {indices:?} at cutoffs {cutoffs:?}"),
    ));
    report.push(CheckRecord::absolute(
        "de Rham index vs spectral index",
        rhs.re,
        index as f64,
        config.tolerances.de_rham_integer,
    ));
    report.push(
        CheckRecord::relative(
            format!(
                "JLO pairing at cap {} vs de Rham index",
                config.sweeps.degree_cap
            ),
            pairing.pairing.re,
            rhs.re,
            config.tolerances.pairing_relative,
        )
        .with_tail_info(pairing.tail_bound)
        .with_threshold(threshold),
    );

    let one = IdempotentField::constant(e.domain(), DMatrix::identity(1, 1))?;
    for &k in &config.models.fluxes {
        let model = landau_model(k, config.models.landau_levels)?;
        for &t in &config.sweeps.heat_times {
            let r = k_pairing_index(&model, &one, t, config.sweeps.degree_cap)?;
            report.push(
                CheckRecord::absolute(
                    format!("pairing of e=1 on landau({k}) at t={t}"),
                    r.pairing.re,
                    k as f64,
                    config.tolerances.supertrace,
                )
                .with_tail(r.tail_bound),
            );
        }
    }
    Ok(())
}

fn charclass(config: &RunConfig, report: &mut VerificationReport) -> Result<()> {
    let g4 = Generators::FOUR;
    let theta = MultiVector::monomial(g4, &[1, 2], 1.0)? + MultiVector::monomial(g4, &[3, 4], 1.0)?;
    let top = MultiVector::monomial(g4, &[1, 2, 3, 4], 1.0 / 12.0)?;
    let complex = a_hat(&FormMatrix::skew_block(
        theta.scale(Complex64::new(0.0, -1.0)),
    )?)?;
    let expected = MultiVector::one(g4) - top.clone();
    report.push(
        CheckRecord::absolute(
            "a_hat of the block with eigenvalues +-theta",
            complex.abs_diff(&expected),
            0.0,
            1e-15,
        )
        .with_note(complex.to_string()),
    );
    let real = a_hat(&FormMatrix::skew_block(theta)?)?;
    let expected = MultiVector::one(g4) + top;
    report.push(
        CheckRecord::absolute(
            "a_hat of the rotation block",
            real.abs_diff(&expected),
            0.0,
            1e-15,
        )
        .with_note(real.to_string()),
    );

    let g = Generators::TWO;
    let torus = Domain::Torus { n: 32 };
    let one = IdempotentField::constant(torus, DMatrix::identity(1, 1))?;
    for &k in &config.models.fluxes {
        let f = FormMatrix::diagonal(
            g,
            vec![MultiVector::blade(
                g,
                g.top(),
                Complex64::new(0.0, -2.0 * PI * k as f64),
            )],
        )?;
        let v = rhs_index(&one, &FormMatrix::zero(2, g), &f)?;
        report.push(CheckRecord::absolute(
            format!("de Rham index of the flux-{k} line bundle"),
            v.re,
            k as f64,
            config.tolerances.de_rham_integer,
        ));
    }

    let bott = bott_projection(config.models.bott_grid)?;
    let v = rhs_index(&bott, &FormMatrix::zero(2, g), &FormMatrix::zero(1, g))?;
    report.push(
        CheckRecord::absolute(
            "de Rham index of the Bott projection",
            v.re,
            v.re.round(),
            config.tolerances.de_rham_integer,
        )
        .with_note(format!("{v}")),
    );
    let mut ch = Vec::new();
    ch_de_rham(&bott)?.write_csv(&mut ch)?;
    report.tables.push(csv_table("bott_ch_de_rham", &ch)?);

    let [n_polar, n_azimuth] = config.models.sphere_grid;
    let sphere = Domain::Sphere { n_polar, n_azimuth };
    let tautological = IdempotentField::from_fn(sphere, |[z, phi]| {
        let s = (1.0 - z * z).sqrt();
        spin_projection([s * phi.cos(), s * phi.sin(), z])
    })?;
    let c = integrate_top(&ch_de_rham(&tautological)?) * index_prefactor(1);
    report.push(
        CheckRecord::absolute(
            "de Rham index of the tautological projection on S^2",
            c.re,
            -1.0,
            config.tolerances.sphere_integer,
        )
        .with_note(format!("{c}")),
    );
    Ok(())
}

/// Parses a CSV written by the core crate into a numeric table.
fn csv_table(name: &str, bytes: &[u8]) -> Result<Table> {
    let mut reader = csv::Reader::from_reader(bytes);
    let header = reader.headers()?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        rows.push(
            record
                .iter()
                .map(|s| s.parse::<f64>().unwrap_or(f64::NAN))
                .collect(),
        );
    }
    Ok(Table {
        name: name.into(),
        header,
        rows,
    })
}
