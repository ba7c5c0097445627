import copy
import json

import pytest

from qmckay.potential import bundle_document, parse_bundle


@pytest.fixture(scope="session")
def orbifold_doc():
    return bundle_document("z5-orbifold")


@pytest.fixture(scope="session")
def resolution_doc():
    return bundle_document("z5-resolution")


@pytest.fixture(scope="session")
def orbifold(orbifold_doc):
    return parse_bundle(orbifold_doc)


@pytest.fixture(scope="session")
def resolution(resolution_doc):
    return parse_bundle(resolution_doc)


@pytest.fixture
def perturbed_doc(resolution_doc):
    """Resolution bundle with the b4 entry of its first charge vector changed from -5 to -4."""
    doc = copy.deepcopy(resolution_doc)
    doc["charge_rows"][0][3] = {"c0": "-4", "c1": "0"}
    return doc


@pytest.fixture
def write_json(tmp_path):
    def write(doc, name="bundle.json"):
        path = tmp_path / name
        path.write_text(json.dumps(doc))
        return str(path)

    return write
