import hypothesis

hypothesis.settings.register_profile(
    "suite", deadline=None, print_blob=True
)
hypothesis.settings.load_profile("suite")
