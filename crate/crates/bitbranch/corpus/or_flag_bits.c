// Setting a constant flag bit: the result is at least the flag value.
int main() {
  int flags;
  int ready;
  flags = __VERIFIER_nondet_int();
  flags = flags % 16;
  if (flags < 0) {
    flags = flags + 16;
  }
  ready = flags | 8;
  assert(ready >= 8);
  flags = ready | 0;
  assert(flags == ready);
  return 0;
}
