use fracflow::mesh::MeshFamily;
use fracflow::model::{make_case, CaseKind};
use fracflow::norms::{compute_errors, convergence_orders, NormMode, NormOptions};
use fracflow::scheme::{Discretization, MeshBundle, SchemeKind};
use fracflow::study::{run_study, StudyConfig, CSV_HEADER};
use fracflow::Error;

fn config(scheme: SchemeKind, refinements: Vec<usize>) -> StudyConfig {
    let mut c = StudyConfig::new(
        scheme,
        MeshFamily::Cartesian,
        refinements,
        CaseKind::Isotropic,
    );
    c.record_timings = false;
    c
}

#[test]
fn doubling_quadrature_changes_errors_by_less_than_a_thousandth() {
    for s in [SchemeKind::VagFe, SchemeKind::VagCv, SchemeKind::Hfv] {
        for mode in [NormMode::Nodal, NormMode::Continuous, NormMode::Discrete] {
            let mut c = config(s, vec![8]);
            c.norm = mode;
            let a = run_study(&c, false).unwrap().levels[0].errors;
            c.quadrature_levels = 1;
            let b = run_study(&c, false).unwrap().levels[0].errors;
            for (x, y) in [
                (a.err_sol, b.err_sol),
                (a.err_grad, b.err_grad),
                (a.err_jump, b.err_jump),
            ] {
                assert!((x - y).abs() < 1e-3 * y, "{s:?} {mode:?}: {x} vs {y}");
            }
        }
    }
}

#[test]
fn interpolant_error_decreases_at_least_linearly() {
    let case = make_case(CaseKind::Isotropic, 1.0).unwrap();
    let opts = NormOptions {
        mode: NormMode::Continuous,
        ..Default::default()
    };
    for s in [SchemeKind::VagFe, SchemeKind::VagCv, SchemeKind::Hfv] {
        let mut errs = Vec::new();
        let mut cells = Vec::new();
        for n in [8, 16, 32] {
            let b = MeshBundle::new(MeshFamily::Cartesian, n).unwrap();
            let d = Discretization::build(s, &b, &case.data).unwrap();
            let p = d.layout.interpolate(&case);
            errs.push(compute_errors(&d, &p, &case, &opts).err_sol);
            cells.push(b.mesh.n_cells());
        }
        // orders are reported with two decimals
        for o in convergence_orders(&errs, &cells) {
            assert!((o.unwrap() * 100.0).round() >= 100.0, "{s:?}: {errs:?}");
        }
    }
}

#[test]
fn csv_is_reproducible_and_carries_the_orders() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(SchemeKind::Hfv, vec![4, 8]);
    c.csv = Some(dir.path().join("a.csv"));
    let first = run_study(&c, false).unwrap();
    let a = std::fs::read_to_string(dir.path().join("a.csv")).unwrap();
    c.csv = Some(dir.path().join("b.csv"));
    run_study(&c, false).unwrap();
    let b = std::fs::read_to_string(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b);

    let mut rd = csv::Reader::from_reader(a.as_bytes());
    let header: Vec<String> = rd.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, CSV_HEADER);
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let rows: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
    let levels: Vec<_> = rows.iter().filter(|r| &r[0] == "level").collect();
    let orders: Vec<_> = rows.iter().filter(|r| &r[0] == "order").collect();
    assert_eq!((levels.len(), orders.len()), (2, 1));
    assert!(levels.iter().all(|r| r[col("cpu_seconds")].is_empty()));
    let cells: Vec<usize> = levels
        .iter()
        .map(|r| r[col("cells")].parse().unwrap())
        .collect();
    for (err, alpha) in [
        ("err_sol", "alpha_sol"),
        ("err_grad", "alpha_grad"),
        ("err_jump", "alpha_jump"),
    ] {
        let e: Vec<f64> = levels
            .iter()
            .map(|r| r[col(err)].parse().unwrap())
            .collect();
        let o = convergence_orders(&e, &cells)[0].unwrap();
        let printed: f64 = orders[0][col(alpha)].parse().unwrap();
        assert!((o - printed).abs() < 1e-6 * o.abs(), "{err}");
    }
    assert_eq!(
        levels[1][col("err_sol")].parse::<f64>().unwrap(),
        first.levels[1].errors.err_sol
    );
}

#[test]
fn vtk_output_describes_cells_and_fracture_faces() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(SchemeKind::VagFe, vec![4]);
    c.vtk_dir = Some(dir.path().to_path_buf());
    run_study(&c, true).unwrap();
    let path = dir.path().join("vag-fe_cartesian_isotropic_n4.vtk");
    let text = std::fs::read_to_string(path).unwrap();
    let b = MeshBundle::new(MeshFamily::Cartesian, 4).unwrap();
    let total = b.mesh.n_cells() + b.fractures.faces.len();

    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# vtk DataFile Version 3.0");
    let find = |key: &str| lines.iter().position(|l| l.starts_with(key)).unwrap();
    let points: usize = lines[find("POINTS")]
        .split_whitespace()
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(points, b.mesh.vertices.len());
    let cells: Vec<usize> = lines[find("CELLS")]
        .split_whitespace()
        .skip(1)
        .map(|t| t.parse().unwrap())
        .collect();
    assert_eq!(cells[0], total);
    let conn = &lines[find("CELLS") + 1..find("CELLS") + 1 + total];
    let size: usize = conn.iter().map(|l| l.split_whitespace().count()).sum();
    assert_eq!(size, cells[1]);
    for l in conn {
        let v: Vec<usize> = l.split_whitespace().map(|t| t.parse().unwrap()).collect();
        assert_eq!(v[0] + 1, v.len());
        assert!(v[1..].iter().all(|&i| i < points));
    }
    let data: usize = lines[find("CELL_DATA")]
        .split_whitespace()
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(data, total);
    for name in ["pressure", "jump"] {
        let at = lines
            .iter()
            .position(|l| l.starts_with("SCALARS") && l.split_whitespace().nth(1) == Some(name))
            .unwrap();
        let values: Vec<f64> = lines[at + 2..at + 2 + total]
            .iter()
            .map(|l| l.trim().parse().unwrap())
            .collect();
        assert!(values.iter().all(|v| v.is_finite()));
    }
}

#[test]
fn invalid_configurations_are_rejected() {
    let base = r#"{"scheme":"vag-fe","mesh":"cartesian","refinements":[4,8],"case":"isotropic"}"#;
    assert!(StudyConfig::from_json(base).is_ok());
    let cases = [
        r#"{"scheme":"vag-fe","mesh":"cartesian","refinements":[],"case":"isotropic"}"#,
        r#"{"scheme":"vag-fe","mesh":"cartesian","refinements":[8,4],"case":"isotropic"}"#,
        r#"{"scheme":"vag-fe","mesh":"cartesian","refinements":[4],"case":"isotropic","xi":0.5}"#,
        r#"{"scheme":"vag-fe","mesh":"cartesian","refinements":[4],"case":"isotropic","tolerance":0}"#,
        r#"{"scheme":"vag-fe","mesh":"cartesian","refinements":[4],"case":"isotropic","colour":1}"#,
        r#"{"scheme":"tpfa","mesh":"cartesian","refinements":[4],"case":"isotropic"}"#,
    ];
    for c in cases {
        assert!(StudyConfig::from_json(c).is_err(), "{c}");
    }
    let mut c = StudyConfig::from_json(base).unwrap();
    c.apply_override("xi=0.75").unwrap();
    assert_eq!(c.xi, Some(0.75));
    assert!(matches!(
        c.apply_override("xi=0.5"),
        Err(Error::InvalidParameter { .. })
    ));
    assert!(c.apply_override("no-equals-sign").is_err());
}
