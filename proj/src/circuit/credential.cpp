#include "expresso/circuit/credential.hpp"

#include "expresso/zk/encoding.hpp"

namespace expresso::circuit {

Bytes ClientCredential::to_bytes() const
{
    ByteWriter w;
    zk::write_field(w, client_id);
    w.raw(signature.to_bytes());
    w.raw(idp_credential_pk.to_bytes());
    return std::move(w).take();
}

ClientCredential ClientCredential::from_bytes(ByteView bytes)
{
    ByteReader r(bytes);
    ClientCredential c;
    c.client_id = zk::read_field<zk::Fr>(r);
    auto sig = zk::Signature::from_bytes(r.raw(zk::Signature::kEncodedBytes));
    auto pk = zk::EdwardsPoint::from_bytes(r.raw(zk::EdwardsPoint::kEncodedBytes));
    r.expect_done();
    if (!sig || !pk) throw Error(Errc::MalformedEncoding, "malformed credential");
    c.signature = *sig;
    c.idp_credential_pk = *pk;
    return c;
}

}  // namespace expresso::circuit
