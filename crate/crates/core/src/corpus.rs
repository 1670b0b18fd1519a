//! The bundled example algebras. Groups use the signature
//! `mul` (binary), `inv` (unary), `e` (nullary).
//!
//! Encodings: `Z2xZ2` ranks `(a, b)` as `2a + b`; `S3` and `D4` rank
//! `r^i s^j` as `i + m·j` (m = 3, 4), so the center of `D4` is `{0, 2}`.

use crate::algebra::FiniteAlgebra;

macro_rules! bundled {
    ($($fn_name:ident => $file:literal),* $(,)?) => {
        $(
            pub fn $fn_name() -> FiniteAlgebra {
                FiniteAlgebra::from_json(include_str!(concat!("../corpus/", $file)))
                    .expect(concat!("bundled algebra ", $file, " is valid"))
            }
        )*

        /// File names of every bundled algebra.
        pub const FILES: &[&str] = &[$($file),*];
    };
}

bundled! {
    z2 => "Z2.json",
    z4 => "Z4.json",
    z2x2 => "Z2x2.json",
    z6 => "Z6.json",
    s3 => "S3.json",
    d4 => "D4.json",
    trivial => "trivial.json",
    set2 => "set2.json",
    semilattice3 => "semilattice3.json",
}

/// The six groups: Z2, Z4, Z2×Z2, Z6, S3, D4.
pub fn groups() -> Vec<FiniteAlgebra> {
    vec![z2(), z4(), z2x2(), z6(), s3(), d4()]
}

/// Looks a bundled algebra up by its `name` field.
pub fn by_name(name: &str) -> Option<FiniteAlgebra> {
    [
        z2(),
        z4(),
        z2x2(),
        z6(),
        s3(),
        d4(),
        trivial(),
        set2(),
        semilattice3(),
    ]
    .into_iter()
    .find(|a| a.name() == name)
}
