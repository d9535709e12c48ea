import pytest

from fopz.services.ksum import KSumInstance
from fopz.utils import ksum_text
from fopz.utils.errors import KSumFormatError


def test_dumps_layout():
    inst = KSumInstance.from_weighted([{1: 1, 2: 3}, {-4: 1}], 5)
    assert ksum_text.dumps(inst) == "2 5\n1 2:3\n-4\n"


def test_loads_reads_multiplicities():
    inst = ksum_text.loads("3 0\n1 2\n3:2\n-4\n")
    assert inst.k == 3
    assert inst.lists[1] == ((3, 2),)
    assert inst.target == 0


def test_file_round_trip(tmp_path):
    inst = KSumInstance.from_weighted([{0: 2, 7: 1}, {-3: 4}, {}], -1)
    path = tmp_path / "inst.ksum"
    ksum_text.write(inst, path)
    assert ksum_text.read(path) == inst


@pytest.mark.parametrize("text", [
    "",
    "3\n1\n2\n3\n",
    "1 0\n1\n",
    "2 0\n1\n",
    "2 0\n1 1\n2\n",
    "2 0\n1:0\n2\n",
    "2 0\nx\n2\n",
    "2 0\n1\n2\n3\n",
])
def test_loads_rejects(text):
    with pytest.raises(KSumFormatError):
        ksum_text.loads(text)


def test_read_missing_file(tmp_path):
    with pytest.raises(KSumFormatError):
        ksum_text.read(tmp_path / "absent.ksum")
