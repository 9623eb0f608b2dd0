# Test package for syndest
