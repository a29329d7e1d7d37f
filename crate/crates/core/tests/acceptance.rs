// placeholder; filled in once the suites exist
