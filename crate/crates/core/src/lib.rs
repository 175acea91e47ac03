pub mod smoke {
    use nalgebra::{Cholesky, DMatrix, SymmetricEigen};
    use num_complex::Complex64;

    pub fn check() -> (Vec<f64>, f64) {
        let a = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(2.0, 0.0),
                Complex64::new(0.5, 0.5),
                Complex64::new(0.5, -0.5),
                Complex64::new(3.0, 0.0),
            ],
        );
        let eig = SymmetricEigen::new(a.clone());
        let chol = Cholesky::new(a).unwrap();
        let ld: f64 = 2.0 * chol.l().diagonal().iter().map(|z| z.re.ln()).sum::<f64>();
        (eig.eigenvalues.iter().cloned().collect(), ld)
    }
}
