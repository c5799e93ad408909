import quatheta


def test_version():
    assert quatheta.version()
