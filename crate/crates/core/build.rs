fn main() {
    // LAPACK/BLAS provider. Defaults to the system libraries (`liblapack`,
    // `libblas`); override with e.g. OKM_LAPACK_LIBS="openblas" if the
    // system exposes a single combined library under a different name.
    let libs = std::env::var("OKM_LAPACK_LIBS").unwrap_or_else(|_| "lapack,blas".to_string());
    for lib in libs.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        println!("cargo:rustc-link-lib=dylib={lib}");
    }
    println!("cargo:rerun-if-env-changed=OKM_LAPACK_LIBS");
}
