//! Writes a simulated stream in both encodings, reads it back and shows
//! the binary layout.

use qdpairs::io::{encode_binary, read_tagfile, write_tagfile, RECORD_BYTES};
use qdpairs::mc::{simulate, ExperimentConfig, ExperimentKind};
use qdpairs::physics::SourceParams;

fn main() -> qdpairs::Result<()> {
    let stream = simulate(
        &SourceParams::default(),
        &ExperimentConfig::new(ExperimentKind::LifetimeX).with_pulses(50_000),
    )?;
    let dir = std::env::temp_dir().join("qdpairs-example");
    std::fs::create_dir_all(&dir).map_err(|e| qdpairs::Error::io(&dir, e))?;
    for name in ["lifetime.cstg", "lifetime.csv"] {
        let path = dir.join(name);
        write_tagfile(&path, &stream)?;
        let back = read_tagfile(&path)?;
        let size = std::fs::metadata(&path).map_err(|e| qdpairs::Error::io(&path, e))?.len();
        println!("{}: {size} bytes, lossless = {}", path.display(), back == stream);
    }
    let bytes = encode_binary(&stream);
    let header = bytes.len() - stream.record_count() * RECORD_BYTES;
    println!("{} records of {RECORD_BYTES} bytes after a {header}-byte header", stream.record_count());
    for r in &stream.records()[..5] {
        println!("  ch {} pulse {:>3} t = {} ps", r.channel, r.pulse_index, r.timestamp);
    }
    Ok(())
}
