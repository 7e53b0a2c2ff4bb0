// The classic xor swap, checked against saved copies.
int main() {
  int a;
  int b;
  int a0;
  int b0;
  a = __VERIFIER_nondet_int();
  b = __VERIFIER_nondet_int();
  a = a % 97;
  b = b % 89;
  a0 = a;
  b0 = b;
  a = a ^ b;
  b = a ^ b;
  a = a ^ b;
  assert(a == b0);
  assert(b == a0);
  return 0;
}
