//! Exact arithmetic and Fourier analysis on Q_p.

pub mod bruhat;
pub mod character;
pub mod haar;
pub mod number;
pub mod place;

pub use bruhat::{random_bruhat, Ball, BruhatFile, BruhatFileTerm, BruhatFunction};
pub use character::{character_table, eval_local_character, LocalCharacter, PlaceCharacter, RootOfUnity};
pub use haar::{haar_integral, Measure};
pub use number::{PadicNumber, DEFAULT_PRECISION};
pub use place::Place;
