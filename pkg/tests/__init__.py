# The package contains the tests for the packaged app, along
# with a standalone `test_app` that contains a barebones Django
# app that can be used for testing the local webserver.
