//! Stickelberger elements, Euler factors, cyclotomic elements, L-elements and the series f(T, chi omega).

pub mod cyclo_elem;
pub mod euler;
pub mod iwasawa;
mod kernel;
pub mod lelement;
pub mod lp;
pub mod stickelberger;

pub use cyclo_elem::{
    cyclo_element_checks, euler_norm_check, euler_norm_check_arithmetic, tower_norm_check, CycloCheck,
    CycloElement, CycloReport,
};
pub use euler::{euler_factor, EulerFactor};
pub use iwasawa::{
    check_series_char, iwasawa_series, iwasawa_series_at_level, iwasawa_series_batch, iwasawa_series_generic,
    series_level, IwasawaSeries,
};
pub use lelement::{l_element, LElement};
pub use lp::{lp_eval, lp_eval_series, lp_oracle, odd_partner};
pub use stickelberger::{
    smoothed_stickelberger, smoothing_element, stickelberger, stickelberger_coeff, stickelberger_tower,
    StickelbergerElem,
};
