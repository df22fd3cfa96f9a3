//! Run configuration and time-tag file formats.

mod atomic;
mod config;
mod tagfile;

pub use atomic::write_atomic;
pub use config::{parse_config, OutputPaths, RunConfig};
pub use tagfile::{
    decode_binary, decode_csv, encode_binary, encode_csv, read_tagfile, write_tagfile, TagFormat,
    FORMAT_VERSION, MAGIC, RECORD_BYTES,
};
