import pytest

from atlaspaint.synthetic import write_demo_atlas


@pytest.fixture(scope="session")
def demo_paths(tmp_path_factory):
    """Synthetic atlas tree shared across the session (read-only)."""
    root = tmp_path_factory.mktemp("demo")
    return write_demo_atlas(root)


@pytest.fixture(scope="session")
def demo_manifest(demo_paths):
    from atlaspaint.atlas import load_manifest

    return load_manifest(demo_paths["manifest"])


@pytest.fixture(scope="session")
def hollow_manifest(demo_paths):
    from atlaspaint.atlas import load_manifest

    return load_manifest(demo_paths["hollow_manifest"])
