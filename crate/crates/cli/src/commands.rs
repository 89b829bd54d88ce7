use std::path::{Path, PathBuf};

use raimsim::atomcore::species::{atom_mass_amu, ion_mass_amu, reduced_mass};
use raimsim::atomcore::{build_basis, parse_half_integer, QuantumDefectTable, RydbergLevel};
use raimsim::dynamics::{self, build_level_scheme, LevelScheme, SearchOptions, Trajectory};
use raimsim::floquet::{scan_eflo, FloquetOptions, FloquetScan, TrapDrive, TrapOrientation, Waveform};
use raimsim::franckcondon::{all_spectra, build_overlap_tables, FockCutoff, FockLabel};
use raimsim::modes::{normal_modes, Configuration};
use raimsim::scaling::{self, fit_survey, survey_level, ScalingConstants, SurveyOptions};
use raimsim::starkmap::scan::diagonalize_at;
use raimsim::starkmap::{build_multipole, diagonalize_scan, locate_well, reference_energy, WellSearch};
use raimsim::units::{amu_to_me, bohr_to_nm, energy_to_ghz, energy_to_mhz, nm_to_bohr, BOHR_NM};

use crate::config::{locate, RunConfig, WaveformName};
use crate::output::{col, num, opt, Column, OutputDir};
use crate::{AntiblockadeArgs, BlockadeArgs, CliError, CritMapArgs, Figure, FloquetArgs, GeometryArgs, OverlapArgs, ReproArgs, SchemeArgs, StarkMapArgs};

const MULTIPOLE_ORDER: u32 = 6;

pub fn parse_orientation(s: &str) -> Result<TrapOrientation, String> {
    match s {
        "radial" => Ok(TrapOrientation::Radial),
        "axial" => Ok(TrapOrientation::Axial),
        _ => Err(format!("unknown orientation `{s}` (radial or axial)")),
    }
}

/// `lo:hi` or `lo:hi:step`, with an optional trailing unit.
fn parse_range(s: &str, unit: &str, parts: usize) -> Result<Vec<f64>, CliError> {
    let body = s.trim().trim_end_matches(unit);
    let v: Result<Vec<f64>, _> = body.split(':').map(|x| x.trim().parse::<f64>()).collect();
    match v {
        Ok(v) if v.len() == parts && v.iter().all(|x| x.is_finite()) => Ok(v),
        _ => Err(CliError::Config(format!("cannot parse range `{s}`: expected {parts} colon-separated numbers"))),
    }
}

/// Evenly spaced grid including both ends.
fn grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0) || !(hi > lo) {
        return Err(CliError::Config(format!("grid needs lo < hi and a positive step, got {lo}:{hi}:{step}")));
    }
    let m = ((hi - lo) / step).round() as usize;
    Ok((0..=m).map(|i| lo + step * i as f64).collect())
}

fn parse_state(s: &str) -> Result<(u32, u32), CliError> {
    let bad = || CliError::Config(format!("cannot parse state `{s}` (expected e.g. P1/2)"));
    let mut chars = s.chars();
    let letter = chars.next().ok_or_else(bad)?;
    let l = "SPDFGHIK".find(letter.to_ascii_uppercase()).ok_or_else(bad)? as u32;
    let j2 = parse_half_integer(chars.as_str()).ok_or_else(bad)?;
    if j2 + 1 != 2 * l && j2 != 2 * l + 1 {
        return Err(bad());
    }
    Ok((l, j2))
}

fn parse_cutoff(s: &str) -> Result<FockCutoff, CliError> {
    let mut c = FockCutoff::default();
    for part in s.split(',') {
        let (k, v) = part.split_once('=').ok_or_else(|| CliError::Config(format!("bad cutoff entry `{part}`")))?;
        let v: u32 = v.trim().parse().map_err(|_| CliError::Config(format!("bad cutoff value `{v}`")))?;
        match k.trim() {
            "bus" => c.bus_total = v,
            "high" => c.high_max = v,
            other => return Err(CliError::Config(format!("unknown cutoff key `{other}` (bus, high)"))),
        }
    }
    Ok(c)
}

fn label(n: &FockLabel) -> String {
    n.iter().map(|k| k.to_string()).collect()
}

fn defect_table(cfg: &RunConfig) -> Result<QuantumDefectTable, CliError> {
    atom_mass_amu(&cfg.atom.species)?;
    match &cfg.atom.defects {
        Some(p) => Ok(QuantumDefectTable::load(&locate(p))?),
        None => Ok(QuantumDefectTable::rb87()),
    }
}

fn out_dir(cfg: &RunConfig, command: &str) -> Result<OutputDir, CliError> {
    OutputDir::new(&cfg.output.dir, command, cfg.hash(command))
}

fn announce(path: &Path) {
    eprintln!("wrote {}", path.display());
}

pub fn stark_map(mut cfg: RunConfig, a: &StarkMapArgs) -> Result<(), CliError> {
    if let Some(s) = &a.species {
        cfg.atom.species = s.clone();
    }
    if let Some(s) = &a.ion {
        cfg.atom.ion = s.clone();
    }
    ion_mass_amu(&cfg.atom.ion)?;
    let table = defect_table(&cfg)?;
    let (l, j2) = parse_state(&a.state)?;
    let reference = RydbergLevel::new(a.n, l, j2, 1)?;
    let r = grid(a.rmin, a.rmax, a.step)?;
    let op = build_multipole(&build_basis(a.n, &[1], &table)?, &table, MULTIPOLE_ORDER)?;
    let e_ref = reference_energy(a.n, &table)?;
    let bohr: Vec<f64> = r.iter().map(|&x| nm_to_bohr(x)).collect();
    let set = diagonalize_scan(&op, &bohr, e_ref, false)?;
    let mut rows = Vec::with_capacity(set.len() * set.dim());
    for k in 0..set.len() {
        for c in 0..set.dim() {
            let overlap = if k == 0 {
                None
            } else {
                set.links[k - 1].iter().position(|&b| b == c).map(|p| set.link_overlap[k - 1][p])
            };
            rows.push(vec![
                num(r[k]),
                c.to_string(),
                num(energy_to_ghz(set.energies[k][c])),
                set.levels[set.dominant[k][c]].label(),
                opt(overlap),
            ]);
        }
    }
    let mut notes = vec![format!("energies relative to the {}P reference level; curve_index is the adiabatic energy rank", a.n)];
    if let Ok(rank) = set.index_by_label(&reference.label()) {
        notes.push(format!("{} is curve {rank} at the outer grid edge", reference.label()));
    }
    let cols = [
        col("r_ci_nm", "nm"),
        col("curve_index", "1"),
        col("energy_GHz", "GHz"),
        col("dominant_level_label", "label"),
        col("overlap_with_previous", "1"),
    ];
    let command = format!("stark-map species={} ion={} n={} state={} r={}:{}:{}", cfg.atom.species, cfg.atom.ion, a.n, a.state, a.rmin, a.rmax, a.step);
    announce(&out_dir(&cfg, &command)?.write(&a.out, &cols, &notes, &rows)?);
    Ok(())
}

/// Floquet scan of the nP1/2 well; returns the scan and the drive.
fn run_floquet(cfg: &RunConfig, a: &FloquetArgs) -> Result<FloquetScan, CliError> {
    let table = defect_table(cfg)?;
    let m_ion = ion_mass_amu(&cfg.atom.ion)?;
    let mu = amu_to_me(reduced_mass(atom_mass_amu(&cfg.atom.species)?, m_ion));
    let w = parse_range(&a.window, "nm", 3)?;
    let r: Vec<f64> = grid(w[0], w[1], w[2])?.into_iter().map(nm_to_bohr).collect();
    let e_ref = reference_energy(a.n, &table)?;
    let level = RydbergLevel::new(a.n, 1, 1, 1)?;
    let op1 = build_multipole(&build_basis(a.n, &[1], &table)?, &table, MULTIPOLE_ORDER)?;
    let located = locate_well(&op1, e_ref, &level, mu, &WellSearch { vibrational_count: 1, ..Default::default() }, None)?;
    let trap = &cfg.trap;
    let drive = TrapDrive::new(trap.q, trap.omega_rf_mhz, trap.waveform.into(), trap.orientation, m_ion, trap.steps)?;
    let opts = FloquetOptions { subspace: trap.subspace, lz: Some((located.well.omega, mu)), ..Default::default() };
    let scan = match trap.orientation {
        TrapOrientation::Radial => scan_eflo(&op1, e_ref, located.rank, &drive, &r, &opts)?,
        TrapOrientation::Axial => {
            // The m_j = 1/2 curve keeps its energy but not its rank once the
            // −3/2 and 5/2 sectors are added; match it at the window centre.
            let mid = r[r.len() / 2];
            let target = diagonalize_at(&op1, mid, e_ref)?.energies[located.rank];
            drop(op1);
            let op3 = build_multipole(&build_basis(a.n, &[-3, 1, 5], &table)?, &table, MULTIPOLE_ORDER)?;
            let e3 = diagonalize_at(&op3, mid, e_ref)?.energies;
            let rank = (0..e3.len())
                .min_by(|&i, &j| (e3[i] - target).abs().total_cmp(&(e3[j] - target).abs()))
                .expect("non-empty basis");
            scan_eflo(&op3, e_ref, rank, &drive, &r, &opts)?
        }
    };
    Ok(scan)
}

fn floquet_overrides(cfg: &mut RunConfig, a: &FloquetArgs) {
    let t = &mut cfg.trap;
    if let Some(v) = a.drive {
        t.waveform = v;
    }
    if let Some(v) = a.q {
        t.q = v;
    }
    if let Some(v) = a.omega_rf_mhz {
        t.omega_rf_mhz = v;
    }
    if let Some(v) = a.steps {
        t.steps = v;
    }
    if let Some(v) = a.orientation {
        t.orientation = v;
    }
    if let Some(v) = a.subspace {
        t.subspace = v;
    }
}

pub fn floquet_scan(mut cfg: RunConfig, a: &FloquetArgs) -> Result<(), CliError> {
    floquet_overrides(&mut cfg, a);
    let scan = run_floquet(&cfg, a)?;
    let omega = scan.drive.omega;
    let rows: Vec<Vec<String>> = scan
        .points
        .iter()
        .zip(&scan.flagged)
        .enumerate()
        .map(|(k, (p, &flag))| {
            let plz = scan.crossings.iter().find(|c| c.index == k).and_then(|c| c.p_lz);
            vec![
                num(bohr_to_nm(p.r)),
                num(energy_to_ghz(p.e_flo())),
                num(p.overlap()),
                (flag as u8).to_string(),
                opt(p.pair_gap(omega).map(energy_to_mhz)),
                opt(plz),
            ]
        })
        .collect();
    let cols = [
        col("r_ci_nm", "nm"),
        col("E_flo_GHz", "GHz"),
        col("overlap", "1"),
        col("is_crossing", "bool"),
        col("gap_MHz", "MHz"),
        col("P_LZ", "1"),
    ];
    let notes = vec![
        format!("n = {}, adiabatic rank {}, {} crossings detected", a.n, scan.rank, scan.crossings.len()),
        "E_flo relative to the nP reference level".to_string(),
    ];
    let command = format!("floquet-scan n={} window={}", a.n, a.window);
    announce(&out_dir(&cfg, &command)?.write(&a.out, &cols, &notes, &rows)?);
    Ok(())
}

pub fn lz_digital(mut cfg: RunConfig, a: &FloquetArgs) -> Result<(), CliError> {
    cfg.trap.omega_rf_mhz = 10.0;
    floquet_overrides(&mut cfg, a);
    cfg.trap.waveform = WaveformName::Digital;
    let scan = run_floquet(&cfg, a)?;
    debug_assert_eq!(scan.drive.waveform, Waveform::Digital);
    let rows: Vec<Vec<String>> = scan
        .crossings
        .iter()
        .map(|c| {
            vec![
                num(bohr_to_nm(c.r)),
                num(energy_to_mhz(c.gap)),
                opt(c.slope.map(|s| energy_to_ghz(s) / BOHR_NM)),
                opt(c.p_lz),
                opt(c.p_lz.map(|p| 1.0 - p)),
            ]
        })
        .collect();
    let cols = [
        col("r_ci_nm", "nm"),
        col("gap_MHz", "MHz"),
        col("slope_GHz_per_nm", "GHz/nm"),
        col("P_LZ", "1"),
        col("shade", "1"),
    ];
    let notes = vec![format!("n = {}, digital drive, shade = 1 - P_LZ", a.n)];
    let command = format!("lz-digital n={} window={}", a.n, a.window);
    announce(&out_dir(&cfg, &command)?.write(&a.out, &cols, &notes, &rows)?);
    Ok(())
}

fn write_crit_map(cfg: &RunConfig, command: &str, range: [f64; 2], points: usize, out: &Path) -> Result<(), CliError> {
    let m_ion = ion_mass_amu(&cfg.atom.ion)?;
    let rows: Vec<Vec<String>> = scaling::crit_map(&ScalingConstants::published(), cfg.trap.q, m_ion, range[0], range[1], points)?
        .iter()
        .map(|r| vec![num(r.omega_mhz), num(r.n_crit_rad), num(r.n_crit_ax), num(r.n_single_photon)])
        .collect();
    let cols = [col("omega_rf_mhz", "MHz"), col("n_crit_rad", "1"), col("n_crit_ax", "1"), col("n_single_photon", "1")];
    let notes = vec![format!("q = {}, ion {}, published scaling constants", cfg.trap.q, cfg.atom.ion)];
    announce(&out_dir(cfg, command)?.write(out, &cols, &notes, &rows)?);
    Ok(())
}

pub fn crit_map(mut cfg: RunConfig, a: &CritMapArgs) -> Result<(), CliError> {
    if let Some(q) = a.q {
        cfg.trap.q = q;
    }
    if let Some(ion) = &a.ion {
        cfg.atom.ion = ion.clone();
    }
    let r = parse_range(&a.omega_range_mhz, "MHz", 2)?;
    write_crit_map(&cfg, &format!("crit-map omega={}:{} points={}", r[0], r[1], a.points), [r[0], r[1]], a.points, &a.out)
}

pub fn modes(mut cfg: RunConfig, a: &GeometryArgs) -> Result<(), CliError> {
    if let Some(p) = &a.geometry {
        cfg.load_geometry(p)?;
    }
    let mut rows = Vec::new();
    for c in Configuration::ALL {
        let s = normal_modes(&cfg.geometry, c)?;
        for (k, (f, v)) in s.frequencies.iter().zip(&s.vectors).enumerate() {
            let mut row = vec![c.label().to_string(), (k + 1).to_string(), num(*f)];
            row.extend(v.iter().map(|x| num(*x)));
            row.extend(s.equilibrium.iter().map(|x| num(*x)));
            rows.push(row);
        }
    }
    let cols = [
        col("config", "label"),
        col("mode_index", "1"),
        col("freq_mhz", "MHz"),
        col("v1", "1"),
        col("v2", "1"),
        col("v3", "1"),
        col("v4", "1"),
        col("eq1", "um"),
        col("eq2", "um"),
        col("eq3", "um"),
        col("eq4", "um"),
    ];
    let notes = vec![
        "coordinates (ion 1, ion 2, atom 1, atom 2); vectors mass-weighted and normalized".to_string(),
        "modes ordered by descending frequency".to_string(),
    ];
    let command = "modes".to_string();
    announce(&out_dir(&cfg, &command)?.write(&a.out, &cols, &notes, &rows)?);
    Ok(())
}

fn scheme_overrides(cfg: &mut RunConfig, a: &SchemeArgs) -> Result<(), CliError> {
    if let Some(p) = &a.geometry {
        cfg.load_geometry(p)?;
    }
    let o = &mut cfg.overlaps;
    if let Some(k) = a.k_per_um {
        o.k_per_um = k;
    }
    if let Some(s) = &a.cutoff_spec {
        let c = parse_cutoff(s)?;
        o.bus_total = c.bus_total;
        o.high_max = c.high_max;
    }
    if let Some(q) = a.order {
        o.order = q;
    }
    if a.no_verify {
        o.verify = false;
    }
    Ok(())
}

fn tables(cfg: &RunConfig) -> Result<(Vec<raimsim::modes::ModeSpectrum>, Vec<raimsim::franckcondon::OverlapTable>), CliError> {
    let spectra = all_spectra(&cfg.geometry)?;
    let o = &cfg.overlaps;
    let t = build_overlap_tables(&cfg.geometry, &spectra, o.k_per_um, &o.cutoff(), &o.quadrature())?;
    Ok((spectra, t))
}

fn scheme(cfg: &RunConfig) -> Result<LevelScheme, CliError> {
    let (spectra, t) = tables(cfg)?;
    Ok(build_level_scheme(&spectra, &t)?)
}

pub fn overlaps(mut cfg: RunConfig, a: &OverlapArgs) -> Result<(), CliError> {
    scheme_overrides(&mut cfg, &a.scheme)?;
    let (_, tabs) = tables(&cfg)?;
    let mut rows = Vec::new();
    for t in &tabs {
        let pair = format!("{}-{}", t.source.label(), t.target.label());
        for (i, n) in t.states.iter().enumerate() {
            for (j, m) in t.states.iter().enumerate() {
                let v = t.values[i][j];
                rows.push(vec![pair.clone(), label(n), label(m), num(v.re), num(v.im), num(v.norm())]);
            }
        }
    }
    let cols = [col("pair", "label"), col("N", "fock"), col("Nprime", "fock"), col("re", "1"), col("im", "1"), col("abs", "1")];
    let notes = vec![format!(
        "S = <lower,N| exp(i k zeta) |upper,N'>, k = {} per um, quadrature order {}",
        cfg.overlaps.k_per_um, cfg.overlaps.order
    )];
    let command = "overlaps".to_string();
    announce(&out_dir(&cfg, &command)?.write(&a.out, &cols, &notes, &rows)?);
    Ok(())
}

const TRAJECTORY_COLUMNS: [Column; 6] = [
    col("t_us", "us"),
    col("pop_gg", "1"),
    col("pop_gR", "1"),
    col("pop_Rg", "1"),
    col("pop_RR", "1"),
    col("norm", "1"),
];

fn trajectory_rows(t: &Trajectory) -> Vec<Vec<String>> {
    t.t.iter()
        .zip(&t.populations)
        .zip(&t.norm)
        .map(|((t, p), n)| {
            let mut r = vec![num(*t)];
            r.extend(p.iter().map(|x| num(*x)));
            r.push(num(*n));
            r
        })
        .collect()
}

fn run_blockade(cfg: &RunConfig, command: &str, out: &Path) -> Result<(), CliError> {
    let s = scheme(cfg)?;
    let d = &cfg.dynamics;
    let t = dynamics::blockade(&s, d.omega1_mhz, d.tf_us, &d.evolve())?;
    let p = t.final_populations();
    let notes = vec![
        format!("Omega1 = 2pi x {} MHz square pulse, t_f = {} us", d.omega1_mhz, d.tf_us),
        format!("max RR population {:.6}", t.max_population(Configuration::Rr)),
        format!("final populations gg {:.6} gR {:.6} Rg {:.6} RR {:.6}", p[0], p[1], p[2], p[3]),
    ];
    announce(&out_dir(cfg, command)?.write(out, &TRAJECTORY_COLUMNS, &notes, &trajectory_rows(&t))?);
    Ok(())
}

pub fn blockade(mut cfg: RunConfig, a: &BlockadeArgs) -> Result<(), CliError> {
    scheme_overrides(&mut cfg, &a.scheme)?;
    let d = &mut cfg.dynamics;
    d.omega1_mhz = a.omega1_mhz.unwrap_or(0.057);
    if let Some(v) = a.tf_us {
        d.tf_us = v;
    }
    if let Some(v) = a.dt_ns {
        d.dt_ns = v;
    }
    run_blockade(&cfg, "blockade", &a.out)
}

fn run_antiblockade(cfg: &RunConfig, command: &str, out: [&Path; 2]) -> Result<(), CliError> {
    let s = scheme(cfg)?;
    let d = &cfg.dynamics;
    let opts = SearchOptions {
        rabi: [d.omega1_mhz, d.omega2_mhz],
        tf: d.tf_us,
        components: d.np,
        draws: d.draws,
        seed: d.seed,
        evolve: d.evolve(),
        ..Default::default()
    };
    let res = dynamics::optimize_antiblockade(&s, &opts)?;
    let p = res.trajectory.final_populations();
    let describe = |i: usize| {
        let q = &res.pulses[i];
        format!(
            "f{}: A = {}, a = {} us^2, b = {} us, c = {:?}, f = {:?} MHz",
            i + 1,
            q.amplitude,
            q.width,
            q.centre,
            q.coefficients,
            q.frequencies
        )
    };
    let notes = vec![
        format!("Omega1 = 2pi x {} MHz, Omega2 = 2pi x {} MHz, t_f = {} us", d.omega1_mhz, d.omega2_mhz, d.tf_us),
        format!("best of {} draws: draw {}, cost {:.6}", d.draws, res.draw, res.cost),
        format!("final populations gg {:.6} gR {:.6} Rg {:.6} RR {:.6}", p[0], p[1], p[2], p[3]),
        describe(0),
        describe(1),
    ];
    let dir = out_dir(cfg, command)?;
    announce(&dir.write(out[0], &TRAJECTORY_COLUMNS, &notes, &trajectory_rows(&res.trajectory))?);
    let rows: Vec<Vec<String>> = res
        .trajectory
        .t
        .iter()
        .map(|&t| vec![num(t), num(res.pulses[0].value(t)), num(res.pulses[1].value(t))])
        .collect();
    let cols = [col("t_us", "us"), col("f1", "1"), col("f2", "1")];
    announce(&dir.write(out[1], &cols, &notes, &rows)?);
    Ok(())
}

pub fn antiblockade(mut cfg: RunConfig, a: &AntiblockadeArgs) -> Result<(), CliError> {
    scheme_overrides(&mut cfg, &a.scheme)?;
    let d = &mut cfg.dynamics;
    let set = |x: &mut f64, v: Option<f64>| {
        if let Some(v) = v {
            *x = v;
        }
    };
    set(&mut d.omega1_mhz, a.omega1_mhz);
    set(&mut d.omega2_mhz, a.omega2_mhz);
    set(&mut d.tf_us, a.tf_us);
    set(&mut d.dt_ns, a.dt_ns);
    if let Some(v) = a.draws {
        d.draws = v;
    }
    if let Some(v) = a.np {
        d.np = v;
    }
    if let Some(v) = a.seed {
        d.seed = v;
    }
    run_antiblockade(&cfg, "antiblockade", [&a.out[0], &a.out[1]])
}

fn fig_s3(cfg: &RunConfig, ns: &[u32], out: &Path) -> Result<(), CliError> {
    let table = defect_table(cfg)?;
    let opts = SurveyOptions {
        m_atom_amu: atom_mass_amu(&cfg.atom.species)?,
        m_ion_amu: ion_mass_amu(&cfg.atom.ion)?,
        ..Default::default()
    };
    let mut rows = Vec::new();
    let mut survey = Vec::new();
    for &n in ns {
        eprintln!("surveying n = {n}");
        let r = survey_level(n, &table, &opts)?;
        rows.push(vec![
            n.to_string(),
            num(bohr_to_nm(r.d)),
            num(energy_to_mhz(r.omega)),
            num(energy_to_ghz(r.moments.delta_e)),
            num(r.moments.z),
            opt(r.moments.rho),
            r.rank.to_string(),
        ]);
        survey.push(r);
    }
    let mut notes = Vec::new();
    if survey.len() >= 3 {
        let f = fit_survey(&survey)?;
        let line = |name: &str, fit: &scaling::PowerLawFit| format!("fit {name}: {:.6e} n^{:.4}", fit.prefactor, fit.exponent);
        notes.push(line("d [a0]", &f.d));
        notes.push(line("omega_M [Hartree]", &f.omega));
        notes.push(line("|delta_E| [Hartree]", &f.gap));
        notes.push(line("|z| [a0]", &f.z));
        if let Some(rho) = &f.rho {
            notes.push(line("|rho| [a0^2]", rho));
        }
    }
    let cols = [
        col("n", "1"),
        col("d_nm", "nm"),
        col("omega_M_MHz", "MHz"),
        col("delta_E_GHz", "GHz"),
        col("z_a0", "a0"),
        col("rho_a0sq", "a0^2"),
        col("rank", "1"),
    ];
    let command = format!("repro figS3 {ns:?}");
    announce(&out_dir(cfg, &command)?.write(out, &cols, &notes, &rows)?);
    Ok(())
}

pub fn repro(mut cfg: RunConfig, a: &ReproArgs) -> Result<(), CliError> {
    match a.figure {
        Figure::Fig2e => {
            cfg.trap.q = 0.1;
            write_crit_map(&cfg, "repro fig2e", [1.0, 1000.0], 200, &PathBuf::from("fig2e.csv"))
        }
        Figure::Fig3a => {
            cfg.dynamics.omega1_mhz = 0.057;
            run_blockade(&cfg, "repro fig3a", Path::new("fig3a.csv"))
        }
        Figure::Fig3b => run_antiblockade(&cfg, "repro fig3b", [Path::new("fig3b_traj.csv"), Path::new("fig3b_pulses.csv")]),
        Figure::FigS3 => fig_s3(&cfg, &a.n_list, Path::new("figS3.csv")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_and_grids() {
        assert_eq!(parse_range("180:190:0.01nm", "nm", 3).unwrap(), vec![180.0, 190.0, 0.01]);
        assert_eq!(parse_range("1:1000", "MHz", 2).unwrap(), vec![1.0, 1000.0]);
        assert!(parse_range("1:x", "MHz", 2).is_err());
        assert!(parse_range("1:2:3", "MHz", 2).is_err());
        let g = grid(184.0, 186.0, 0.01).unwrap();
        assert_eq!(g.len(), 201);
        assert!((g[200] - 186.0).abs() < 1e-9);
        assert!(grid(2.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn states_and_cutoffs() {
        assert_eq!(parse_state("P1/2").unwrap(), (1, 1));
        assert_eq!(parse_state("D5/2").unwrap(), (2, 5));
        assert!(parse_state("P5/2").is_err());
        assert!(parse_state("Q1/2").is_err());
        assert_eq!(parse_cutoff("bus=2,high=0").unwrap(), FockCutoff { bus_total: 2, high_max: 0 });
        assert!(parse_cutoff("low=1").is_err());
        assert_eq!(label(&[0, 0, 1, 0]), "0010");
    }
}
