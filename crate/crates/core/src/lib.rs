pub mod error;
pub mod harmonics;
pub mod maxwell_radial;
pub mod specfun;
pub mod synthesis;
pub mod tensor3;
