#![no_main]

use libfuzzer_sys::fuzz_target;
use wgfem::mesh::{parse_mesh_dump, write_mesh_dump};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(mesh) = parse_mesh_dump(text) else {
        return;
    };
    assert!(mesh.validate().is_ok());
    let dump = write_mesh_dump(&mesh);
    let again = parse_mesh_dump(&dump).expect("written dump parses");
    assert_eq!(write_mesh_dump(&again), dump);
});
