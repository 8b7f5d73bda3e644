//! Characteristic ideals over Lambda = O[[T]] and its truncations.

pub mod frobenius;
pub mod ideal;
pub mod presentation;
pub mod weierstrass;

pub use frobenius::{delta_characters, euler_factor_ideal, frobenius_quotient_char};
pub use ideal::{alternating_char, base_change, BaseChange, FractionalIdeal, IdealComponent};
pub use presentation::{
    char_of_presentation, determinant, divide_audited, mu_vanishing_check, DetRoute, MatrixInput,
    PresentedModule,
};
pub use weierstrass::{weierstrass, LambdaTrunc, Weierstrass};
