"""Extension build for the python package; CMake remains the primary build."""

from pathlib import Path

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

ROOT = Path(__file__).resolve().parent


def generate_default_lexicon() -> str:
    """Expand src/default_lexicon.cpp.in the same way the CMake build does."""
    template = (ROOT / "src" / "default_lexicon.cpp.in").read_text(encoding="utf-8")
    lexicon = (ROOT / "data" / "lexicon.json").read_text(encoding="utf-8")
    out_dir = ROOT / "build" / "setuptools-generated"
    out_dir.mkdir(parents=True, exist_ok=True)
    out = out_dir / "default_lexicon.cpp"
    out.write_text(template.replace("@QLENS_LEXICON_JSON@", lexicon), encoding="utf-8")
    return str(out.relative_to(ROOT))


sources = sorted(str(p.relative_to(ROOT)) for p in (ROOT / "src").glob("*.cpp"))
sources.append(generate_default_lexicon())
sources.append("python/bindings.cpp")

setup(
    ext_modules=[
        Pybind11Extension(
            "quarterlens._quarterlens",
            sources,
            include_dirs=["include", "vendor"],
            libraries=["png", "jpeg", "crypto"],
            cxx_std=20,
        )
    ],
    cmdclass={"build_ext": build_ext},
)
