//! Arabic script handling: character inventory, preprocessing and undotting.

pub mod alphabet;
mod preprocess;
mod undot;

pub use alphabet::{char_class, CharClass};
pub use preprocess::{preprocess, preprocess_into, DropHistogram, LanguageMode};
pub use undot::{
    base_map, positional_override, undot, AlphabetDump, Position, UndotError, UndotRule,
};
