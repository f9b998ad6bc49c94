fn main() {
    let dir = std::env::var("CARGO_MANIFEST_DIR").unwrap();
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
    let config = cbindgen::Config::from_file(format!("{dir}/cbindgen.toml")).expect("cbindgen.toml");
    // parse the one source file directly; no `cargo metadata` round trip
    let header = cbindgen::Builder::new()
        .with_config(config)
        .with_src(format!("{dir}/src/lib.rs"))
        .generate();
    match header {
        Ok(b) => {
            b.write_to_file(format!("{dir}/include/zstar.h"));
        }
        Err(e) => println!("cargo:warning=header not regenerated: {e}"),
    }
}
