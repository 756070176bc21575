fn main() {
    // System LAPACK/BLAS (reference implementation shipped with liblapack-dev).
    println!("cargo:rustc-link-lib=dylib=lapack");
    println!("cargo:rustc-link-lib=dylib=blas");
}
