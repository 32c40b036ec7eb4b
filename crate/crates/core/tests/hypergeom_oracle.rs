use spin_wehrl::hypergeom::gauss_2f1;

const ORACLE: &str = include_str!("data/hyp2f1_oracle.csv");

fn oracle_rows() -> Vec<[f64; 5]> {
    ORACLE
        .lines()
        .skip(1)
        .map(|line| {
            let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
            [v[0], v[1], v[2], v[3], v[4]]
        })
        .collect()
}

#[test]
fn matches_multiprecision_oracle() {
    let rows = oracle_rows();
    assert_eq!(rows.len(), 50);
    for [a, b, c, z, expected] in rows {
        let got = gauss_2f1(a, b, c, z).unwrap();
        let rel = ((got - expected) / expected).abs();
        assert!(
            rel <= 1e-12,
            "2F1({a},{b};{c};{z}) = {got}, oracle {expected}, rel {rel:e}"
        );
    }
}

#[test]
fn euler_transformation() {
    // a = 1 is kept so that c - a stays positive
    for &(b, c) in &[(2.0, 4.0), (3.0, 5.0), (1.5, 4.5), (2.2, 3.9), (11.0, 23.0)] {
        for k in 0..20 {
            let z = 0.02 + 0.97 * k as f64 / 19.0;
            let lhs = gauss_2f1(1.0, b, c, z).unwrap();
            let rhs = (1.0 - z).powf(c - 1.0 - b) * gauss_2f1(c - 1.0, c - b, c, z).unwrap();
            let rel = ((lhs - rhs) / lhs).abs();
            assert!(rel <= 1e-11, "b={b} c={c} z={z}: {lhs} vs {rhs} ({rel:e})");
        }
    }
}

#[test]
fn monotone_in_z() {
    let mut prev = 1.0;
    for k in 1..200 {
        let z = k as f64 / 200.0;
        let f = gauss_2f1(1.0, 3.0, 6.0, z).unwrap();
        assert!(f > prev);
        prev = f;
    }
}
