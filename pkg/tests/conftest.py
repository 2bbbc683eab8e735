import pytest

FIB_SPEC = """\
# Fibonacci chain
lambda = -1
K = 0
b: const 1
m: const 1
W: const 0
"""

G11_SPEC = """\
lambda = -1
K = 0
b: const 1
m: geom 1 1/11
W: const 0
"""


@pytest.fixture
def chain_file(tmp_path):
    def write(text, name="chain.txt"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    return write
